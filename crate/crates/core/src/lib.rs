pub mod module;
pub mod steenrod;
pub mod resolve;
pub mod cache;
pub mod les;
pub mod scenario;

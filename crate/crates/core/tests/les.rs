use std::sync::{Arc, OnceLock};

use extlab_core::les::{compose_boundaries, connecting_map, horseshoe_lift, les_exactness_report, LesError, Ses};
use extlab_core::module::{a_mod_sq1, factor_map, GradedModule, ModuleMap};
use extlab_core::resolve::{minimal_resolution, Resolution};
use extlab_core::scenario::{scenario_map, ScenarioKind, ScenarioSpec};
use extlab_core::steenrod::AlgebraTable;
use extlab_f2::BitMatrix;

const S: usize = 6;
const T: usize = 16;

fn table() -> &'static AlgebraTable {
    static TB: OnceLock<AlgebraTable> = OnceLock::new();
    TB.get_or_init(|| AlgebraTable::new(T))
}

fn resolve(m: &Arc<GradedModule>, s: usize) -> Arc<Resolution> {
    Arc::new(minimal_resolution(table(), Arc::clone(m), s, T).unwrap())
}

/// `0 -> I -> A/ASq1 -> F2 -> 0`
fn augmentation_ses() -> Ses {
    let q = a_mod_sq1(table(), T).unwrap().module;
    let f2 = Arc::new(GradedModule::f2(T));
    let mats = (0..=T)
        .map(|t| if t == 0 { BitMatrix::identity(1) } else { BitMatrix::zeros(0, q.dim(t)) })
        .collect();
    let eps = ModuleMap::new(q, f2, mats).unwrap();
    Ses::kernel_sequence(&factor_map(&eps).unwrap())
}

#[test]
fn augmentation_sequence() {
    let ses = augmentation_ses();
    let (ri, rf) = (resolve(ses.sub(), S), resolve(ses.quotient(), S + 1));
    let lift = horseshoe_lift(table(), &ses, ri, rf).unwrap();
    lift.check_horseshoe(table()).unwrap();
    let d = connecting_map(&lift).unwrap();
    let mid = resolve(ses.middle(), S).ext_chart();
    let report = les_exactness_report(Some(&mid), &d);
    assert!(report.passed() && report.checked > 0, "{report:?}");
    for s in 0..=d.max_s {
        for t in 0..=d.max_t {
            if t != s && t != s + 1 {
                let m = d.matrix(s, t);
                assert_eq!((m.rows(), d.rank(s, t)), (m.cols(), m.cols()), "({s},{t})");
            }
        }
    }
    // h_1 in Ext^{1,2}(F2) is hit from I
    assert_eq!(d.rank(0, 2), 1);
}

#[test]
fn degenerate_sequences_have_zero_boundary() {
    let q = a_mod_sq1(table(), T).unwrap().module;
    let f = factor_map(&ModuleMap::identity(Arc::clone(&q))).unwrap();
    for ses in [Ses::kernel_sequence(&f), Ses::image_sequence(&f)] {
        let (rk, ri) = (resolve(ses.sub(), S), resolve(ses.quotient(), S + 1));
        let lift = horseshoe_lift(table(), &ses, rk, ri).unwrap();
        lift.check_horseshoe(table()).unwrap();
        let d = connecting_map(&lift).unwrap();
        assert!(d.is_zero());
        let mid = resolve(ses.middle(), S).ext_chart();
        assert!(les_exactness_report(Some(&mid), &d).passed());
    }
}

#[test]
fn free_middle_makes_the_boundary_an_isomorphism_above_zero() {
    let spec = ScenarioSpec::new(ScenarioKind::Fbig, S, T);
    let f = factor_map(&scenario_map(table(), &spec).unwrap()).unwrap();
    let ses = Ses::kernel_sequence(&f);
    let lift = horseshoe_lift(table(), &ses, resolve(ses.sub(), S), resolve(ses.quotient(), S + 1)).unwrap();
    let d = connecting_map(&lift).unwrap();
    for t in 0..=d.max_t {
        let m = d.matrix(0, t);
        assert_eq!(d.rank(0, t), m.rows(), "onto at t={t}");
        for s in 1..=d.max_s {
            let m = d.matrix(s, t);
            assert_eq!((m.rows(), d.rank(s, t)), (m.cols(), m.cols()), "({s},{t})");
        }
    }
}

#[test]
fn boundary_ranks_ignore_generator_order() {
    let spec = ScenarioSpec::new(ScenarioKind::Fbig, S, T);
    let f = factor_map(&scenario_map(table(), &spec).unwrap()).unwrap();
    let k_seq = Ses::kernel_sequence(&f);
    let i_seq = Ses::image_sequence(&f);
    let rk = resolve(k_seq.sub(), S);
    let ri = resolve(i_seq.sub(), S + 1);
    let rc = resolve(i_seq.quotient(), S + 2);
    let boundaries = |rk: &Arc<Resolution>, ri: &Arc<Resolution>, rc: &Arc<Resolution>| {
        let ik = connecting_map(&horseshoe_lift(table(), &k_seq, Arc::clone(rk), Arc::clone(ri)).unwrap()).unwrap();
        let ci = connecting_map(&horseshoe_lift(table(), &i_seq, Arc::clone(ri), Arc::clone(rc)).unwrap()).unwrap();
        let beta = compose_boundaries(&ik, &ci).unwrap();
        (ik, ci, beta)
    };
    let (ik, ci, beta) = boundaries(&rk, &ri, &rc);
    let rev = |r: &Arc<Resolution>| Arc::new(r.reversed_within_degrees(table()).unwrap());
    let (ik2, ci2, beta2) = boundaries(&rev(&rk), &rev(&ri), &rev(&rc));
    for s in 0..=beta.max_s {
        for t in 0..=beta.max_t {
            assert_eq!(beta.rank(s, t), beta2.rank(s, t), "beta ({s},{t})");
        }
    }
    for (a, b) in [(&ik, &ik2), (&ci, &ci2)] {
        for s in 0..=a.max_s {
            for t in 0..=a.max_t {
                assert_eq!(a.rank(s, t), b.rank(s, t), "({s},{t})");
            }
        }
    }
}

#[test]
fn mismatched_resolutions_are_refused() {
    let ses = augmentation_ses();
    let rf = resolve(ses.quotient(), S);
    let err = horseshoe_lift(table(), &ses, Arc::clone(&rf), rf).unwrap_err();
    assert!(matches!(err, LesError::WrongResolution));
}

#[test]
fn non_exact_pair_is_refused() {
    let q = a_mod_sq1(table(), T).unwrap().module;
    let id = ModuleMap::identity(Arc::clone(&q));
    assert!(Ses::new(id.clone(), id).is_err());
}

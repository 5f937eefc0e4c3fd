use std::sync::OnceLock;

use extlab_core::les::CompositeMap;
use extlab_core::scenario::{
    assemble_e3, build_scenario, compare_projection_filtration, diff_charts, expected_e3, kernel_image_lemma_check,
    verify_scenario, BetaPattern, ScenarioError, ScenarioKind, ScenarioResult, ScenarioSpec,
};
use extlab_core::steenrod::AlgebraTable;
use extlab_f2::BitMatrix;

fn table() -> &'static AlgebraTable {
    static T: OnceLock<AlgebraTable> = OnceLock::new();
    T.get_or_init(|| AlgebraTable::new(28))
}

fn fbig() -> &'static ScenarioResult {
    static R: OnceLock<ScenarioResult> = OnceLock::new();
    R.get_or_init(|| build_scenario(table(), &ScenarioSpec::new(ScenarioKind::Fbig, 10, 26), None).unwrap())
}

fn classes(r: &ScenarioResult) -> Vec<(usize, usize, usize)> {
    r.e3.as_ref()
        .unwrap()
        .entries
        .iter()
        .map(|e| (e.stem, e.filtration, e.dim))
        .collect()
}

#[test]
fn fn_scenarios_collapse() {
    for n in [1, 2, 3, 4, 6] {
        let spec = ScenarioSpec::new(ScenarioKind::Fn(n), 8, n + 14);
        let r = build_scenario(table(), &spec, None).unwrap();
        assert!(r.hypothesis.passed(), "n={n}: {:?}", r.hypothesis.violations);
        assert!(verify_scenario(&r).is_empty(), "n={n}: {:?}", verify_scenario(&r));
        assert_eq!(classes(&r), vec![(0, 0, 1), (n - 1, 1, 1)], "n={n}");
        assert!(r.les_kernel.passed() && r.les_image.passed(), "n={n}");
    }
}

#[test]
fn fn_boundary_maps_are_isomorphisms() {
    let spec = ScenarioSpec::new(ScenarioKind::Fn(4), 8, 18);
    let r = build_scenario(table(), &spec, None).unwrap();
    for d in [&r.d_ik, &r.d_ci] {
        for s in 0..=d.max_s {
            for t in 0..=d.max_t {
                let m = d.matrix(s, t);
                assert_eq!(m.rows(), m.cols(), "({s},{t})");
                assert_eq!(d.rank(s, t), m.cols(), "({s},{t})");
            }
        }
    }
    // Ext^0(C) = F2 and Ext^1(C) = Σ^n F2
    let c = r.chart_c();
    assert_eq!((0..=18).map(|t| c.get(0, t)).sum::<usize>(), 1);
    assert_eq!(c.get(0, 0), 1);
    assert_eq!((0..=18).map(|t| c.get(1, t)).sum::<usize>(), 1);
    assert_eq!(c.get(1, 4), 1);
    // C is the cokernel of right multiplication by Sq^n
    assert_eq!(&r.factored.cokernel.dims()[..5], &[1, 1, 1, 2, 1]);
}

#[test]
fn fnz_scenarios_collapse() {
    for n in [2, 4, 6, 8] {
        let spec = ScenarioSpec::new(ScenarioKind::FnZ(n), 8, n + 14);
        let r = build_scenario(table(), &spec, None).unwrap();
        assert!(verify_scenario(&r).is_empty(), "n={n}: {:?}", verify_scenario(&r));
        let chart = r.e3.as_ref().unwrap();
        for s in 0..=6 {
            assert_eq!(chart.get(0, s), 1, "tower at filtration {s}");
        }
        assert_eq!(chart.get(n - 1, 1), 1);
    }
}

#[test]
fn odd_n_is_permitted_for_fnz() {
    let spec = ScenarioSpec::new(ScenarioKind::FnZ(3), 6, 14);
    let r = build_scenario(table(), &spec, None).unwrap();
    assert!(r.hypothesis.passed());
    assert!(r.e3.is_some());
}

#[test]
fn fbig_has_one_class_per_odd_stem() {
    let r = fbig();
    assert!(verify_scenario(r).is_empty(), "{:?}", verify_scenario(r));
    let chart = r.e3.as_ref().unwrap();
    for s in 0..=8 {
        assert_eq!(chart.get(0, s), 1);
    }
    for stem in 1..=23 {
        let col = chart.column(stem);
        if stem % 2 == 0 {
            assert!(col.is_empty(), "stem {stem}: {col:?}");
        } else {
            let f = if [1, 3, 7, 15].contains(&stem) { 1 } else { 0 };
            assert_eq!(col, vec![(f, 1)], "stem {stem}");
        }
    }
    assert_eq!(r.factored.cokernel.dims().iter().sum::<usize>(), 1);
}

#[test]
fn conjugate_family_gives_the_same_chart() {
    let r = build_scenario(table(), &ScenarioSpec::new(ScenarioKind::FbigConj, 10, 26), None).unwrap();
    assert!(r.e3.as_ref().unwrap().same_classes(fbig().e3.as_ref().unwrap()));
    assert!(kernel_image_lemma_check(&r).passed());
}

#[test]
fn fbig_lemma_internals() {
    let report = kernel_image_lemma_check(fbig());
    assert!(report.passed(), "{report:#?}");
    let r = fbig();
    assert_eq!(r.d_ik.kernel_dim(0, 12), 1);
    assert_eq!(r.d_ik.kernel_dim(0, 8), 0);
    for j in 1..=4 {
        assert_eq!(r.chart_c().get(1, 1 << j), 1);
    }
}

#[test]
fn fbig_image_is_abar_mod_sq1() {
    let r = fbig();
    let q = extlab_core::module::a_mod_sq1(table(), 26).unwrap();
    assert_eq!(r.factored.image.dim(0), 0);
    for t in 1..=26 {
        assert_eq!(r.factored.image.dim(t), q.module.dim(t), "degree {t}");
    }
}

#[test]
fn corrupted_beta_is_caught() {
    let r = fbig();
    let (s, t) = (0..=r.beta.max_t)
        .map(|t| (0, t))
        .find(|&(s, t)| r.beta.rank(s, t) > 0)
        .expect("beta is nonzero somewhere at s = 0");
    let m = r.beta.matrix(s, t);
    let corrupted: CompositeMap = r.beta.clone().with_matrix(s, t, BitMatrix::zeros(m.rows(), m.cols()));
    let chart = assemble_e3(&corrupted, BetaPattern::InjectiveAboveFiltrationZero).unwrap();
    let diff = diff_charts(&chart, &expected_e3(&r.spec));
    assert!(!diff.is_empty());
    // and a corruption above filtration zero is refused outright
    let (s, t) = (0..=r.beta.max_t)
        .map(|t| (1, t))
        .find(|&(s, t)| r.beta.rank(s, t) > 0)
        .unwrap();
    let m = r.beta.matrix(s, t);
    let refused = r.beta.clone().with_matrix(s, t, BitMatrix::zeros(m.rows(), m.cols()));
    let report = assemble_e3(&refused, BetaPattern::InjectiveAboveFiltrationZero).unwrap_err();
    assert_eq!((report.violations[0].s, report.violations[0].t), (s, t));
}

#[test]
fn projection_raises_filtration_off_powers_of_two() {
    let indices = [1, 2, 3, 4, 5, 6, 8];
    let fnz: Vec<ScenarioResult> = indices
        .iter()
        .map(|&i| build_scenario(table(), &ScenarioSpec::new(ScenarioKind::FnZ(2 * i), 6, 2 * i + 6), None).unwrap())
        .collect();
    let deltas = compare_projection_filtration(fbig(), &fnz, &indices).unwrap();
    for d in &deltas {
        let want = if d.i.is_power_of_two() { 0 } else { -1 };
        assert_eq!(d.delta, want, "{d:?}");
        assert_eq!(d.fnz_filtration, 1);
    }
    assert!(matches!(
        compare_projection_filtration(fbig(), &fnz, &[7]),
        Err(ScenarioError::MissingCounterpart { i: 7 })
    ));
}

#[test]
fn bounds_are_validated() {
    for spec in [
        ScenarioSpec::new(ScenarioKind::Fn(0), 8, 16),
        ScenarioSpec::new(ScenarioKind::Fn(6), 8, 8),
        ScenarioSpec::new(ScenarioKind::Fbig, 1, 16),
    ] {
        assert!(matches!(build_scenario(table(), &spec, None), Err(ScenarioError::Bounds(_))));
    }
}

#[test]
fn scenarios_share_the_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cache = extlab_core::cache::ResolutionCache::new(dir.path());
    let spec = ScenarioSpec::new(ScenarioKind::FnZ(2), 6, 12);
    let first = build_scenario(table(), &spec, Some(&cache)).unwrap();
    let files = std::fs::read_dir(dir.path()).unwrap().count();
    assert!(files >= 3);
    let second = build_scenario(table(), &spec, Some(&cache)).unwrap();
    assert_eq!(first.e3, second.e3);
}

//! Problem drivers and reference solvers against dense and 1D oracles.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use snake::baselines::{conjugate_gradient, pg_dual_tv, CgConfig, IncidenceOperator, PgDualConfig};
use snake::graph::{path, sample_sbm, EdgeWeights, Graph};
use snake::problems::{gaussian_signal, Inpainting, LaplacianSystem, TrendFiltering};
use snake::prox1d::tv_prox_path;
use snake::regularizers::Regularizer;
use snake::snake::{run, Problem, SolverConfig, StepSchedule};

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn dense_laplacian(g: &Graph) -> DMatrix<f64> {
    let n = g.num_nodes();
    let mut l = DMatrix::zeros(n, n);
    for &(u, v) in g.edges() {
        l[(u, u)] += 1.0;
        l[(v, v)] += 1.0;
        l[(u, v)] -= 1.0;
        l[(v, u)] -= 1.0;
    }
    l
}

#[test]
fn incidence_quadratic_form_is_laplacian() {
    let g = sample_sbm(&[20, 20], 0.3, 0.05, 3).unwrap();
    let op = IncidenceOperator::new(&g);
    let x = gaussian_signal(40, 1);
    let mut dx = vec![0.0; g.num_edges()];
    op.apply(&x, &mut dx);
    let quad: f64 = dx.iter().map(|v| v * v).sum();
    let direct: f64 = g.edges().iter().map(|&(u, v)| (x[u] - x[v]).powi(2)).sum();
    assert!((quad - direct).abs() < 1e-10 * direct);
    let mut dtdx = vec![0.0; 40];
    op.apply_transpose(&dx, &mut dtdx);
    let mut lx = vec![0.0; 40];
    g.laplacian_apply(&x, &mut lx);
    assert!(max_diff(&dtdx, &lx) < 1e-12);
}

#[test]
fn pg_dual_on_path_matches_taut_string() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for trial in 0..20 {
        let n = rng.random_range(2..60);
        let g = path(n);
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let lambda = rng.random_range(0.05..2.0);
        let weighted = trial % 2 == 1;
        let w =
            EdgeWeights::new(&g, (0..n - 1).map(|_| rng.random_range(0.5..2.0)).collect()).unwrap();
        let res = pg_dual_tv(
            &g,
            &y,
            lambda,
            weighted.then_some(&w),
            &PgDualConfig {
                max_iterations: 1_000_000,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(res.converged, "gap {}", res.gap);
        let exact = tv_prox_path(&y, lambda, weighted.then(|| w.as_slice())).unwrap();
        assert!(max_diff(&res.x, &exact) < 1e-6);
        for (e, z) in res.z.iter().enumerate() {
            let bound = lambda * if weighted { w.get(e) } else { 1.0 };
            assert!(z.abs() <= bound);
        }
    }
}

#[test]
fn pg_dual_small_lambda_returns_signal() {
    let g = sample_sbm(&[15, 15], 0.3, 0.05, 2).unwrap();
    let y = gaussian_signal(30, 5);
    let res = pg_dual_tv(&g, &y, 1e-9, None, &PgDualConfig::default()).unwrap();
    assert!(max_diff(&res.x, &y) < 1e-7);
}

#[test]
fn pg_dual_reports_unconverged_runs() {
    let g = sample_sbm(&[30, 30], 0.2, 0.02, 2).unwrap();
    let y = gaussian_signal(60, 5);
    let config = PgDualConfig {
        max_iterations: 3,
        ..Default::default()
    };
    let res = pg_dual_tv(&g, &y, 1.0, None, &config).unwrap();
    assert!(!res.converged);
    assert_eq!(res.iterations, 3);
    assert!(res.gap > 0.0);
    let iters: Vec<usize> = res.trace.records.iter().map(|r| r.iteration).collect();
    assert_eq!(iters, vec![0, 1, 2, 3]);
}

#[test]
fn cg_identity_converges_in_one_step() {
    let b = gaussian_signal(25, 3);
    let res = conjugate_gradient(
        |x, o| o.copy_from_slice(x),
        &b,
        &vec![0.0; 25],
        &CgConfig::default(),
    )
    .unwrap();
    assert_eq!(res.iterations, 1);
    assert!(max_diff(&res.x, &b) < 1e-14);
}

#[test]
fn harmonic_extension_matches_dense_solve() {
    let g = sample_sbm(&[25, 25], 0.25, 0.04, 6).unwrap();
    let y = gaussian_signal(50, 6);
    let mask = Inpainting::random_mask(50, 0.5, 6);
    let p = Inpainting::new(&g, y.clone(), mask.clone()).unwrap();
    let res = conjugate_gradient(
        |x, o| p.harmonic_apply(x, o),
        p.harmonic_rhs(),
        &vec![0.0; p.free_nodes().len()],
        &CgConfig::default(),
    )
    .unwrap();
    assert!(res.converged);

    // L_UU x = -L_UO y_O from the dense full-graph Laplacian
    let l = dense_laplacian(&g);
    let free: Vec<usize> = (0..50).filter(|&v| !mask[v]).collect();
    let obs: Vec<usize> = (0..50).filter(|&v| mask[v]).collect();
    let luu = DMatrix::from_fn(free.len(), free.len(), |i, j| l[(free[i], free[j])]);
    let rhs = DVector::from_fn(free.len(), |i, _| {
        -obs.iter().map(|&o| l[(free[i], o)] * y[o]).sum::<f64>()
    });
    let dense = luu.lu().solve(&rhs).unwrap();
    assert!(max_diff(&res.x, dense.as_slice()) < 1e-8);
    assert!(p.harmonicity_residual(&res.x) < 1e-8);
}

#[test]
fn inpainting_split_reproduces_full_energy() {
    let g = sample_sbm(&[20, 20], 0.3, 0.05, 8).unwrap();
    let y = gaussian_signal(40, 8);
    let mask = Inpainting::random_mask(40, 0.4, 8);
    let p = Inpainting::new(&g, y.clone(), mask.clone()).unwrap();
    let observed_only: f64 = g
        .edges()
        .iter()
        .filter(|&&(u, v)| mask[u] && mask[v])
        .map(|&(u, v)| (y[u] - y[v]).powi(2))
        .sum();
    let x = gaussian_signal(p.free_nodes().len(), 9);
    let split = p.smooth_value(&x) + p.regularizer().evaluate(p.graph(), &x).unwrap();
    assert!((split + observed_only - p.objective(&x)).abs() < 1e-10 * p.objective(&x));
}

#[test]
fn laplacian_system_matches_pseudo_inverse() {
    let g = sample_sbm(&[60], 0.15, 0.0, 4).unwrap();
    assert!(g.is_connected());
    let p = LaplacianSystem::new(&g, gaussian_signal(60, 4), true).unwrap();
    let res = conjugate_gradient(
        |x, o| g.laplacian_apply(x, o),
        p.rhs(),
        &vec![0.0; 60],
        &CgConfig::default(),
    )
    .unwrap();
    assert!(res.converged);
    let pinv = dense_laplacian(&g).pseudo_inverse(1e-10).unwrap();
    let dense = pinv * DVector::from_column_slice(p.rhs());
    let mean = res.x.iter().sum::<f64>() / 60.0;
    let centered: Vec<f64> = res.x.iter().map(|v| v - mean).collect();
    assert!(max_diff(&centered, dense.as_slice()) < 1e-8);
}

#[test]
fn snake_matches_reference_on_small_gtf() {
    let g = sample_sbm(&[15, 15], 0.3, 0.03, 12).unwrap();
    let y = gaussian_signal(30, 12);
    let lambda = 0.3;
    let reference = pg_dual_tv(&g, &y, lambda, None, &PgDualConfig::default()).unwrap();
    assert!(reference.converged);
    let p = TrendFiltering::new(&g, y, lambda).unwrap();
    let f_star = p.objective(&reference.x);
    let e = g.num_edges() as f64;
    let config = SolverConfig::new(30, StepSchedule::inverse_n(e))
        .with_seed(2)
        .with_max_outer_iterations(3000)
        .with_eval_every(100);
    let out = run(&p, &config).unwrap();
    let best = out.trace.best_objective().unwrap();
    assert!(best >= f_star - 1e-9);
    assert!((best - f_star) / f_star < 0.01, "{best} vs {f_star}");
    assert!(out.trace.best_so_far().windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn weighted_and_unweighted_snake_agree_for_unit_weights() {
    let g = sample_sbm(&[10, 10], 0.4, 0.05, 1).unwrap();
    let y = gaussian_signal(20, 1);
    let a = TrendFiltering::new(&g, y.clone(), 0.5).unwrap();
    let b = TrendFiltering::weighted(&g, y, 0.5, EdgeWeights::uniform(&g, 1.0).unwrap()).unwrap();
    let config = SolverConfig::new(7, StepSchedule::inverse_n(10.0)).with_max_outer_iterations(50);
    assert_eq!(
        run(&a, &config).unwrap().iterate,
        run(&b, &config).unwrap().iterate
    );
    assert_eq!(
        Regularizer::tv().scaled(0.5).evaluate(&g, a.y()).unwrap(),
        b.regularizer().evaluate(&g, a.y()).unwrap()
    );
}

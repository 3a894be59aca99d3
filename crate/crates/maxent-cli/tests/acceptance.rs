//! Acceptance gate. Ten criteria, one test each:
//!
//!  1-2. the two small reference markets solve to their known optima,
//!  3-4. regression against the two reference comparison tables,
//!  5.   analytic gradient/Hessian vs central finite differences,
//!  6.   calibrated densities reprice their inputs,
//!  7.   a-priori distance bounds hold at random interior points,
//!  8.   entropy identities vs independent quadrature oracles,
//!  9.   continuity characterizes the optimum (jumps = gradient),
//!  10.  uniform strong concavity of the entropy surface.
//!
//! Each test finishes by printing one `criterion NN ...: PASS` line.

use maxent_cli::bs;
use maxent_core::density::{build_density, relative_entropy};
use maxent_core::market::{ccs_digitals, validate_slice, DigitalRectangle, EndpointRule};
use maxent_core::solver::{solve_constrained, Start};
use maxent_core::surface::{entropy_from_market, gradient, hessian, strong_concavity_constant};
use maxent_core::{
    solve_buchen_kelly, DigitalVector, MarketSlice, PiecewiseExpDensity, SolverConfig,
};

// ---------------------------------------------------------------------------
// deterministic corpus of random arbitrage-free markets
// ---------------------------------------------------------------------------

/// SplitMix64: tiny, seedable, good enough to drive test-case generation.
struct Rng(u64);

impl Rng {
    fn new(seed: u64) -> Self {
        Rng(seed)
    }

    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        lo + (hi - lo) * u
    }

    /// Uniform integer in `lo..=hi`.
    fn int(&mut self, lo: usize, hi: usize) -> usize {
        lo + (self.next_u64() % (hi - lo + 1) as u64) as usize
    }
}

/// A random strictly convex, strictly monotone call curve: strikes from
/// jittered gaps, call-spread slopes decreasing from just under 0.95 to
/// 0.03 with random spacing, calls accumulated right-to-left from a random
/// tail value. Arbitrage-free by construction for every draw.
fn random_slice(rng: &mut Rng, n: usize) -> MarketSlice {
    let start = rng.uniform(40.0, 80.0);
    let mut strikes = Vec::with_capacity(n);
    let mut k = start;
    for _ in 0..n {
        k += rng.uniform(5.0, 25.0);
        strikes.push(k);
    }
    let weights: Vec<f64> = (0..=n).map(|_| rng.uniform(0.5, 1.5)).collect();
    let total: f64 = weights.iter().sum();
    let mut cum = 0.0;
    let slopes: Vec<f64> = weights
        .iter()
        .map(|w| {
            cum += w;
            0.03 + 0.92 * (total - cum) / total
        })
        .collect();
    let mut calls = vec![0.0; n];
    calls[n - 1] = rng.uniform(1.0, 10.0);
    for i in (0..n - 1).rev() {
        calls[i] = calls[i + 1] + slopes[i + 1] * (strikes[i + 1] - strikes[i]);
    }
    let forward = calls[0] + slopes[0] * strikes[0];
    MarketSlice::new(forward, 1.0, strikes, calls)
}

/// A digital vector with every coordinate at fraction `t ∈ [t_lo, t_hi]`
/// (drawn independently) of its rectangle width.
fn interior(rng: &mut Rng, rect: &DigitalRectangle, t_lo: f64, t_hi: f64) -> DigitalVector {
    let values = (0..rect.n())
        .map(|i| {
            let t = rng.uniform(t_lo, t_hi);
            rect.lower[i] + t * rect.width(i)
        })
        .collect();
    DigitalVector::new(values)
}

fn l2(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

// ---------------------------------------------------------------------------
// quadrature oracle (independent of the closed-form segment moments)
// ---------------------------------------------------------------------------

fn adapt(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    adapt(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Where to truncate integrals over the common support of `ds`: past the
/// last breakpoint, 60 e-folds of the slowest tail decay leave less mass
/// than any tolerance used here.
fn tail_cutoff(ds: &[&PiecewiseExpDensity]) -> f64 {
    let rate = ds
        .iter()
        .map(|d| d.beta().last().unwrap().abs())
        .fold(f64::INFINITY, f64::min);
    let last = ds
        .iter()
        .map(|d| *d.breakpoints().last().unwrap())
        .fold(0.0f64, f64::max);
    last + 60.0 / rate
}

/// Sum of adaptive integrals over each interval of the density grid plus
/// the truncated tail, so the integrand is smooth on every subinterval
/// (except for possible |·| kinks, which the refinement handles).
fn integrate_over_support(ds: &[&PiecewiseExpDensity], f: &dyn Fn(f64) -> f64, tol: f64) -> f64 {
    let mut edges: Vec<f64> = ds[0].breakpoints().to_vec();
    edges.push(tail_cutoff(ds));
    edges
        .windows(2)
        .map(|w| integrate(f, w[0], w[1], tol))
        .sum()
}

fn entropy_by_quadrature(d: &PiecewiseExpDensity) -> f64 {
    let f = |x: f64| {
        let g = d.value(x);
        -g * g.ln()
    };
    integrate_over_support(&[d], &f, 1e-12)
}

fn relative_entropy_by_quadrature(g: &PiecewiseExpDensity, p: &PiecewiseExpDensity) -> f64 {
    let f = |x: f64| {
        let gv = g.value(x);
        gv * (gv.ln() - p.value(x).ln())
    };
    integrate_over_support(&[g, p], &f, 1e-12)
}

fn l1_distance_by_quadrature(a: &PiecewiseExpDensity, b: &PiecewiseExpDensity) -> f64 {
    let f = |x: f64| (a.value(x) - b.value(x)).abs();
    integrate_over_support(&[a, b], &f, 1e-12)
}

fn solve(slice: &MarketSlice, grad_tol: f64) -> (PiecewiseExpDensity, maxent_core::SolverReport) {
    let cfg = SolverConfig {
        grad_tol,
        ..SolverConfig::default()
    };
    solve_buchen_kelly(slice, &cfg).expect("reference market solves")
}

// ---------------------------------------------------------------------------
// criteria
// ---------------------------------------------------------------------------

#[test]
fn criterion_01_single_strike_market_recovers_the_reference_optimum() {
    let slice = MarketSlice::new(100.0, 1.0, vec![100.0], vec![9.9477]);
    let rect = validate_slice(&slice).unwrap();
    assert!(
        (rect.upper[0] - 0.9005).abs() <= 5e-5,
        "upper digital bound {} != 0.9005",
        rect.upper[0]
    );

    let cfg = SolverConfig {
        grad_tol: 1e-9,
        start: Start::Supplied(DigitalVector::new(vec![0.4503])),
        ..SolverConfig::default()
    };
    let (density, report) = solve_buchen_kelly(&slice, &cfg).unwrap();
    assert!(
        (report.solution.values[0] - 0.4962).abs() <= 5e-4,
        "digital {} != 0.4962",
        report.solution.values[0]
    );
    let h = density.entropy();
    assert!((h - 4.6801).abs() <= 5e-4, "entropy {h} != 4.6801");
    assert!(report.iterations <= 5, "{} iterations", report.iterations);
    println!(
        "criterion 01 single-strike reference market (D={:.6}, H={:.6}, {} steps): PASS",
        report.solution.values[0], h, report.iterations
    );
}

#[test]
fn criterion_02_two_strike_market_recovers_the_reference_optimum() {
    let slice = MarketSlice::new(100.0, 1.0, vec![80.0, 120.0], vec![22.2656, 3.7059]);
    let start = ccs_digitals(&slice, EndpointRule::RectangleMidpoint).unwrap();
    assert!(
        (start.values[0] - 0.7178).abs() <= 5e-4,
        "start {:?}",
        start.values
    );
    assert!(
        (start.values[1] - 0.2320).abs() <= 5e-4,
        "start {:?}",
        start.values
    );

    let (density, report) = solve(&slice, 1e-9);
    assert!(
        (report.solution.values[0] - 0.7884).abs() <= 5e-4,
        "digitals {:?}",
        report.solution.values
    );
    assert!(
        (report.solution.values[1] - 0.1991).abs() <= 5e-4,
        "digitals {:?}",
        report.solution.values
    );
    let h = density.entropy();
    assert!((h - 4.6208).abs() <= 5e-4, "entropy {h} != 4.6208");
    assert!(report.iterations <= 5, "{} iterations", report.iterations);
    println!(
        "criterion 02 two-strike reference market (D=({:.6}, {:.6}), H={:.6}, {} steps): PASS",
        report.solution.values[0], report.solution.values[1], h, report.iterations
    );
}

/// Index lists shared by both reference tables: every other spacing doubles,
/// endpoints always included.
const SUBSETS: [&[usize]; 4] = [
    &[0, 8, 16],
    &[0, 4, 8, 12, 16],
    &[0, 2, 4, 6, 8, 10, 12, 14, 16],
    &[0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16],
];

fn subset_slice(slice: &MarketSlice, subset: &[usize]) -> MarketSlice {
    MarketSlice::new(
        slice.forward,
        slice.discount_factor,
        subset.iter().map(|&i| slice.strikes[i]).collect(),
        subset.iter().map(|&i| slice.calls[i]).collect(),
    )
}

/// Entropy-maximizing solve plus the spread-interpolation comparison on one
/// strike subset; returns (max density, its digitals, interpolation
/// relative entropy).
fn table_row(slice: &MarketSlice, grad_tol: f64) -> (PiecewiseExpDensity, Vec<f64>, f64) {
    let (bk, report) = solve(slice, grad_tol);
    let rule = EndpointRule::Supplied {
        first: report.solution.values[0],
        last: *report.solution.values.last().unwrap(),
    };
    let ccs = ccs_digitals(slice, rule).unwrap();
    let ccs_density = build_density(slice, &ccs).unwrap();
    let rel = relative_entropy(&ccs_density, &bk).unwrap();
    (bk, report.solution.values, rel)
}

#[test]
fn criterion_03_flat_lognormal_table_regression() {
    let (f, sigma, t) = (100.0, 0.25, 1.0);
    let strikes: Vec<f64> = (0..17).map(|i| 60.0 + 5.0 * i as f64).collect();
    let calls: Vec<f64> = strikes.iter().map(|&k| bs::call(f, k, sigma, t)).collect();
    let full = MarketSlice::new(f, 1.0, strikes, calls);

    let expected_entropy = [4.616, 4.608, 4.607, 4.607];
    let expected_ccs_rel = [0.003, 0.021, 0.011, 0.004];
    let expected_digitals: [&[f64]; 4] = [
        &[0.967, 0.465, 0.070],
        &[0.973, 0.779, 0.451, 0.197, 0.070],
        &[
            0.974, 0.903, 0.779, 0.617, 0.450, 0.306, 0.196, 0.120, 0.070,
        ],
        &[
            0.973, 0.945, 0.904, 0.847, 0.779, 0.700, 0.617, 0.532, 0.450, 0.374, 0.306, 0.247,
            0.196, 0.154, 0.120, 0.093, 0.070,
        ],
    ];

    for (case, subset) in SUBSETS.iter().enumerate() {
        let slice = subset_slice(&full, subset);
        let (bk, digitals, ccs_rel) = table_row(&slice, 1e-9);
        let h = bk.entropy();
        assert!(
            (h - expected_entropy[case]).abs() <= 5e-3,
            "n={}: entropy {h} != {}",
            subset.len(),
            expected_entropy[case]
        );
        for (i, (&got, &want)) in digitals.iter().zip(expected_digitals[case]).enumerate() {
            assert!(
                (got - want).abs() <= 5e-3,
                "n={}: digital[{i}] {got} != {want}",
                subset.len()
            );
        }
        assert!(
            (ccs_rel - expected_ccs_rel[case]).abs() <= 2e-3,
            "n={}: interpolation rel. entropy {ccs_rel} != {}",
            subset.len(),
            expected_ccs_rel[case]
        );

        // Digitals priced under the generating lognormal itself are nearly
        // entropy-optimal once five or more strikes pin the density down.
        if subset.len() >= 5 {
            let d = DigitalVector::new(
                slice
                    .strikes
                    .iter()
                    .map(|&k| bs::digital(f, k, sigma, t))
                    .collect(),
            );
            let g = build_density(&slice, &d).unwrap();
            let rel = relative_entropy(&g, &bk).unwrap();
            assert!(
                rel < 5e-4,
                "n={}: lognormal-digital rel. entropy {rel} does not round to 0.000",
                subset.len()
            );
        }
    }
    println!("criterion 03 flat lognormal table regression (4 subsets): PASS");
}

#[test]
fn criterion_04_index_option_table_regression() {
    let strikes: Vec<f64> = (0..17).map(|i| 1000.0 + 25.0 * i as f64).collect();
    let calls = vec![
        207.919, 186.796, 166.526, 146.958, 128.294, 110.583, 93.925, 78.522, 64.473, 51.879,
        40.791, 31.308, 23.431, 17.059, 12.042, 8.228, 5.168,
    ];
    let full = MarketSlice::new(1178.00, 1.0, strikes, calls);

    let expected_entropy = [6.6363, 6.6345, 6.6325, 6.6234];
    let expected_ccs_rel = [0.0049, 0.0079, 0.0037, 0.0017];
    let expected_digitals: [&[f64]; 4] = [
        &[0.843, 0.530, 0.095],
        &[0.846, 0.732, 0.532, 0.289, 0.091],
        &[
            0.851, 0.800, 0.729, 0.642, 0.534, 0.411, 0.283, 0.180, 0.095,
        ],
        &[
            0.857, 0.829, 0.797, 0.766, 0.728, 0.689, 0.642, 0.590, 0.533, 0.474, 0.412, 0.347,
            0.284, 0.227, 0.173, 0.137, 0.104,
        ],
    ];

    for (case, subset) in SUBSETS.iter().enumerate() {
        let slice = subset_slice(&full, subset);
        let (bk, digitals, ccs_rel) = table_row(&slice, 1e-9);
        let h = bk.entropy();
        assert!(
            (h - expected_entropy[case]).abs() <= 5e-3,
            "n={}: entropy {h} != {}",
            subset.len(),
            expected_entropy[case]
        );
        for (i, (&got, &want)) in digitals.iter().zip(expected_digitals[case]).enumerate() {
            assert!(
                (got - want).abs() <= 5e-3,
                "n={}: digital[{i}] {got} != {want}",
                subset.len()
            );
        }
        assert!(
            (ccs_rel - expected_ccs_rel[case]).abs() <= 1e-3,
            "n={}: interpolation rel. entropy {ccs_rel} != {}",
            subset.len(),
            expected_ccs_rel[case]
        );
    }
    println!("criterion 04 index option table regression (4 subsets): PASS");
}

#[test]
fn criterion_05_gradient_and_hessian_match_finite_differences() {
    let mut rng = Rng::new(0x0ccc_0005);
    let (mut worst_g, mut worst_h) = (0.0f64, 0.0f64);
    for _ in 0..60 {
        let n = rng.int(1, 8);
        let slice = random_slice(&mut rng, n);
        let rect = validate_slice(&slice).unwrap();
        let d = interior(&mut rng, &rect, 0.15, 0.85);

        let h_at = |v: Vec<f64>| entropy_from_market(&slice, &DigitalVector::new(v)).unwrap();
        let g = gradient(&slice, &d).unwrap().values;
        for i in 0..n {
            let h = 1e-6 * rect.width(i);
            let mut up = d.values.clone();
            up[i] += h;
            let mut dn = d.values.clone();
            dn[i] -= h;
            let fd = (h_at(up) - h_at(dn)) / (2.0 * h);
            let rel = (fd - g[i]).abs() / g[i].abs().max(1.0);
            worst_g = worst_g.max(rel);
            assert!(rel <= 1e-6, "gradient[{i}] rel err {rel:.3e} (n={n})");
        }

        let hess = hessian(&slice, &d).unwrap();
        let grad_at = |v: Vec<f64>| gradient(&slice, &DigitalVector::new(v)).unwrap().values;
        for i in 0..n {
            let h = 3e-5 * rect.width(i);
            let mut up = d.values.clone();
            up[i] += h;
            let mut dn = d.values.clone();
            dn[i] -= h;
            let (gu, gd) = (grad_at(up), grad_at(dn));
            for j in i.saturating_sub(1)..(i + 2).min(n) {
                let fd = (gu[j] - gd[j]) / (2.0 * h);
                let analytic = if j == i {
                    hess.diag[i]
                } else if j + 1 == i {
                    hess.off[j]
                } else {
                    hess.off[i]
                };
                let rel = (fd - analytic).abs() / analytic.abs().max(1.0);
                worst_h = worst_h.max(rel);
                assert!(rel <= 1e-5, "hessian[{i}][{j}] rel err {rel:.3e} (n={n})");
            }
        }
    }
    println!(
        "criterion 05 derivatives vs finite differences (60 slices, worst grad {worst_g:.2e}, worst hess {worst_h:.2e}): PASS"
    );
}

#[test]
fn criterion_06_densities_reprice_their_inputs() {
    let mut rng = Rng::new(0x0ccc_0006);
    for _ in 0..60 {
        let n = rng.int(1, 8);
        let slice = random_slice(&mut rng, n);
        let rect = validate_slice(&slice).unwrap();
        let d = interior(&mut rng, &rect, 0.05, 0.95);
        let g = build_density(&slice, &d).unwrap();

        for i in 0..n {
            let call = g.price_call(slice.strikes[i]);
            let rel = (call - slice.calls[i]).abs() / slice.calls[i];
            assert!(rel <= 1e-9, "call[{i}] rel err {rel:.3e} (n={n})");
            let digital = g.price_digital(slice.strikes[i]);
            let rel = (digital - d.values[i]).abs() / d.values[i];
            assert!(rel <= 1e-9, "digital[{i}] rel err {rel:.3e} (n={n})");
        }
        let mass = g.price_digital(0.0);
        assert!((mass - 1.0).abs() <= 1e-10, "mass {mass} (n={n})");
        let mean = g.price_call(0.0);
        let rel = (mean - slice.forward).abs() / slice.forward;
        assert!(rel <= 1e-10, "mean rel err {rel:.3e} (n={n})");
    }
    println!("criterion 06 repricing on 60 random markets: PASS");
}

#[test]
fn criterion_07_distance_bounds_hold_at_random_interior_points() {
    let mut rng = Rng::new(0x0ccc_0007);
    for _ in 0..5 {
        let n = rng.int(1, 8);
        let slice = random_slice(&mut rng, n);
        let rect = validate_slice(&slice).unwrap();
        let m = strong_concavity_constant(n);
        let (bk, bk_report) = solve(&slice, 1e-10);
        let h_hat = bk.entropy();

        for _ in 0..10 {
            let d = interior(&mut rng, &rect, 0.15, 0.85);
            let gn = gradient(&slice, &d).unwrap().norm();
            let (g_d, _) = solve_constrained(&slice, &d).unwrap();

            let gap = h_hat - g_d.entropy();
            assert!(
                gap <= gn * gn / (2.0 * m),
                "entropy gap {gap:.6e} > bound {:.6e} (n={n})",
                gn * gn / (2.0 * m)
            );
            let dist = l2(&bk_report.solution.values, &d.values);
            assert!(
                dist <= 2.0 * gn / m,
                "digital distance {dist:.6e} > bound {:.6e} (n={n})",
                2.0 * gn / m
            );
            let l1 = l1_distance_by_quadrature(&bk, &g_d);
            assert!(
                l1 <= gn / m.sqrt(),
                "L1 distance {l1:.6e} > bound {:.6e} (n={n})",
                gn / m.sqrt()
            );
        }
    }
    println!("criterion 07 distance bounds at 50 random interior points: PASS");
}

#[test]
fn criterion_08_entropy_identities_and_quadrature_oracles() {
    let mut rng = Rng::new(0x0ccc_0008);
    for _ in 0..30 {
        let n = rng.int(1, 8);
        let slice = random_slice(&mut rng, n);
        let rect = validate_slice(&slice).unwrap();
        let d = interior(&mut rng, &rect, 0.1, 0.9);

        let g = build_density(&slice, &d).unwrap();
        let h_market = entropy_from_market(&slice, &d).unwrap();
        let h_density = g.entropy();
        assert!(
            (h_market - h_density).abs() <= 1e-9,
            "surface entropy {h_market} vs density entropy {h_density}"
        );

        let (bk, _) = solve(&slice, 1e-11);
        let rel = relative_entropy(&g, &bk).unwrap();
        let drop = bk.entropy() - h_density;
        assert!(
            (rel - drop).abs() <= 1e-9,
            "divergence {rel} vs entropy drop {drop} (n={n})"
        );

        let h_quad = entropy_by_quadrature(&g);
        assert!(
            (h_density - h_quad).abs() <= 1e-8,
            "entropy {h_density} vs quadrature {h_quad} (n={n})"
        );
        let rel_quad = relative_entropy_by_quadrature(&g, &bk);
        assert!(
            (rel - rel_quad).abs() <= 1e-8,
            "divergence {rel} vs quadrature {rel_quad} (n={n})"
        );
    }
    println!("criterion 08 entropy identities and quadrature oracles (30 markets): PASS");
}

#[test]
fn criterion_09_continuity_characterizes_the_optimum() {
    let mut rng = Rng::new(0x0ccc_0009);
    let mut off_optimum_checked = 0;
    for _ in 0..40 {
        let n = rng.int(1, 8);
        let slice = random_slice(&mut rng, n);
        let (bk, _) = solve(&slice, 1e-9);
        let max_jump = bk
            .log_density_jumps()
            .iter()
            .fold(0.0f64, |a, j| a.max(j.abs()));
        assert!(max_jump <= 1e-6, "solution max log jump {max_jump:.3e}");

        let rect = validate_slice(&slice).unwrap();
        let d = interior(&mut rng, &rect, 0.15, 0.85);
        let grad = gradient(&slice, &d).unwrap();
        if grad.norm() <= 1e-3 {
            continue; // only clearly off-optimum points are in scope here
        }
        off_optimum_checked += 1;
        let g = build_density(&slice, &d).unwrap();
        let jump = g
            .log_density_jumps()
            .iter()
            .fold(0.0f64, |a, j| a.max(j.abs()));
        let gmax = grad.max_abs();
        assert!(
            (jump - gmax).abs() <= 1e-9,
            "max log jump {jump} vs gradient max-abs {gmax}"
        );
    }
    assert!(
        off_optimum_checked >= 30,
        "only {off_optimum_checked} off-optimum points"
    );
    println!(
        "criterion 09 continuity characterization (40 solves, {off_optimum_checked} off-optimum points): PASS"
    );
}

#[test]
fn criterion_10_curvature_is_uniformly_strongly_concave() {
    let mut rng = Rng::new(0x0ccc_0010);
    for _ in 0..60 {
        let n = rng.int(1, 8);
        let slice = random_slice(&mut rng, n);
        let rect = validate_slice(&slice).unwrap();
        let d = interior(&mut rng, &rect, 0.02, 0.98);
        let hess = hessian(&slice, &d).unwrap();
        let m = strong_concavity_constant(n);

        let v: Vec<f64> = (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let vv: f64 = v.iter().map(|x| x * x).sum();
        let q = hess.quad_form(&v);
        assert!(
            q <= -m * vv,
            "⟨H''v,v⟩ = {q:.6e} above -m|v|² = {:.6e} (n={n})",
            -m * vv
        );
    }
    println!("criterion 10 uniform strong concavity on 60 random markets: PASS");
}

//! Builders for complete verification bundles: the four application
//! families (heat flow with drift, the two rank-one perturbations, delay
//! equations) and randomized positive finite-dimensional instances.

mod hypothesis;

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::Matrix;
use crate::parallel::Execution;
use crate::semigroups::{
    build_delay_generator, delay_weights, scalar_history_functional, Lattice, SemigroupHandle,
};
use crate::spaces::{Cone, Element, Exponent, GridSpace};

pub use hypothesis::{
    invariance_report, ConeRole, FamilyReport, HypothesisReport, InvarianceReport,
    HYPOTHESIS_LAMBDA_OFFSETS, HYPOTHESIS_TIMES,
};

/// Default tolerance for scenarios whose semigroups are matrix exponentials.
pub const MATRIX_TOL: f64 = 1e-8;
/// Default tolerance for the kernel-based heat scenario.
pub const KERNEL_TOL: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ScenarioKind {
    MetzlerRandom {
        seed: u64,
        gap: f64,
        constructed_true: bool,
        /// Violated entry `(row, col)` of a constructed-false instance.
        violation: Option<(usize, usize)>,
    },
    HeatDrift {
        dim: usize,
        b_max: f64,
    },
    RankOneLinfty,
    RankOneLp {
        p: f64,
        q: f64,
    },
    Delay {
        head_dim: usize,
        cells: usize,
        /// `[[0, Φ], [0, 0]]`, the part of the delay generator coming from the
        /// history functional.
        b_tilde: Matrix,
    },
}

/// Everything a verification run needs: the spaces `X, Y, Z, E`, the
/// semigroups `S` on `X`, `S_Y` on `Y`, `T` on `X`, `T_Z` on `Z`, the
/// perturbation `B: Z -> Y`, the cones `K ⊆ X∩Z` and `L` in the dual
/// coordinates, and the combined growth constants.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub label: String,
    pub kind: ScenarioKind,
    pub x: Arc<GridSpace>,
    pub y: Arc<GridSpace>,
    pub z: Arc<GridSpace>,
    pub e: Arc<GridSpace>,
    pub s: SemigroupHandle,
    pub s_y: SemigroupHandle,
    pub t: SemigroupHandle,
    pub t_z: SemigroupHandle,
    pub b: Matrix,
    pub k: Cone,
    pub l: Cone,
    pub m: f64,
    pub omega: f64,
    /// Default tolerance of the statement checks.
    pub tolerance: f64,
    /// Number of cone samples (generators plus random combinations).
    pub sample_count: usize,
    pub sample_seed: u64,
    pub execution: Execution,
    pub hypothesis: HypothesisReport,
}

struct Parts {
    label: String,
    kind: ScenarioKind,
    x: Arc<GridSpace>,
    y: Arc<GridSpace>,
    z: Arc<GridSpace>,
    e: Arc<GridSpace>,
    s: SemigroupHandle,
    t: SemigroupHandle,
    b: Matrix,
    tolerance: f64,
    sample_count: usize,
    sample_seed: u64,
}

impl Scenario {
    fn assemble(p: Parts) -> Result<Scenario> {
        let n = p.x.dim();
        if p.b.rows() != n || p.b.cols() != n {
            return Err(Error::Dimension(format!(
                "B is {}x{}, expected {n}x{n}",
                p.b.rows(),
                p.b.cols()
            )));
        }
        let s_y = p.s.on_space("S_Y", Arc::clone(&p.y))?;
        let t_z = p.t.on_space("T_Z", Arc::clone(&p.z))?;
        let handles = [&p.s, &s_y, &p.t, &t_z];
        let m = handles.iter().map(|h| h.bound().m).fold(1.0, f64::max);
        let omega = handles
            .iter()
            .map(|h| h.bound().omega)
            .fold(f64::NEG_INFINITY, f64::max);
        let k = Cone::orthant(Arc::clone(&p.x));
        let l = Cone::orthant(Arc::clone(&p.e));
        let k_samples = k.samples(p.sample_count, p.sample_seed);
        let l_samples = l.samples(p.sample_count, p.sample_seed.wrapping_add(1));
        let hypothesis = hypothesis::battery(
            &p.s, &s_y, &p.t, &t_z, &k, &l, &k_samples, &l_samples, omega,
        )?;
        Ok(Scenario {
            label: p.label,
            kind: p.kind,
            x: p.x,
            y: p.y,
            z: p.z,
            e: p.e,
            s: p.s,
            s_y,
            t: p.t,
            t_z,
            b: p.b,
            k,
            l,
            m,
            omega,
            tolerance: p.tolerance,
            sample_count: p.sample_count,
            sample_seed: p.sample_seed,
            execution: Execution::default(),
            hypothesis,
        })
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    /// Samples of `K`: every generator, then seeded random combinations.
    pub fn k_samples(&self) -> Vec<Element> {
        self.k.samples(self.sample_count, self.sample_seed)
    }

    /// Samples of `L`, drawn with a seed distinct from those of `K`.
    pub fn l_samples(&self) -> Vec<Element> {
        self.l
            .samples(self.sample_count, self.sample_seed.wrapping_add(1))
    }

    /// `Some(true)` for constructed-true random instances, `Some(false)` for
    /// constructed-false ones, `None` for the other families.
    pub fn constructed_flag(&self) -> Option<bool> {
        match self.kind {
            ScenarioKind::MetzlerRandom {
                constructed_true, ..
            } => Some(constructed_true),
            _ => None,
        }
    }
}

fn require_metzler(name: &str, a: &Matrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::Dimension(format!("{name} must be square")));
    }
    if !a.is_metzler() {
        return Err(Error::Positivity(format!(
            "{name} has a negative off-diagonal entry and does not generate a positive semigroup"
        )));
    }
    Ok(())
}

fn metzler_with_row_sums(rng: &mut ChaCha8Rng, n: usize, gap: f64) -> Matrix {
    let mut a = Matrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { rng.random::<f64>() });
    finish_diagonal(&mut a, gap);
    a
}

fn finish_diagonal(a: &mut Matrix, gap: f64) {
    for i in 0..a.rows() {
        let off: f64 = (0..a.cols()).filter(|&j| j != i).map(|j| a[(i, j)]).sum();
        a[(i, i)] = -off - gap;
    }
}

/// Random positive instance on `n` nodes.
///
/// Weights are drawn from `[0.5, 1]`. A seeded coin decides whether the
/// instance satisfies the generator inequality `A_T <= A_S + B` (then every
/// entry of `A_S + B - A_T` is at least 0.05) or violates it in a single
/// off-diagonal entry by at least 0.5.
pub fn scenario_metzler_random(n: usize, seed: u64, gap: f64) -> Result<Scenario> {
    if !(2..=8).contains(&n) {
        return Err(Error::Domain(format!("n must lie in [2, 8], got {n}")));
    }
    if !(gap >= 0.0) || !gap.is_finite() {
        return Err(Error::Domain(format!("gap must be >= 0, got {gap}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..=1.0)).collect();
    let constructed_true = rng.random_bool(0.5);
    let mut a_s = metzler_with_row_sums(&mut rng, n, gap);
    let mut a_t = metzler_with_row_sums(&mut rng, n, gap);
    let mut violation = None;
    let b = if constructed_true {
        Matrix::from_fn(n, n, |i, j| {
            (a_t[(i, j)] - a_s[(i, j)]).max(0.0) + rng.random_range(0.05..=0.2)
        })
    } else {
        let row = rng.random_range(0..n);
        let col = (row + rng.random_range(1..n)) % n;
        a_s[(row, col)] = 0.0;
        a_t[(row, col)] = rng.random_range(0.5..=1.0);
        finish_diagonal(&mut a_s, gap);
        finish_diagonal(&mut a_t, gap);
        violation = Some((row, col));
        Matrix::from_fn(n, n, |i, j| {
            if (i, j) == (row, col) {
                0.0
            } else {
                (a_t[(i, j)] - a_s[(i, j)]).max(0.0)
            }
        })
    };
    let x = Arc::new(GridSpace::new("X", weights, Exponent::Finite(2.0))?);
    let y = Arc::new(x.with_exponent("Y", Exponent::Finite(2.0)));
    let z = Arc::new(x.with_exponent("Z", Exponent::Finite(2.0)));
    let e = Arc::new(x.with_exponent("E", Exponent::Finite(2.0)));
    let s = SemigroupHandle::matrix_exp("S", a_s, Arc::clone(&x))?;
    let t = SemigroupHandle::matrix_exp("T", a_t, Arc::clone(&x))?;
    Scenario::assemble(Parts {
        label: format!("metzler-random(n={n}, seed={seed})"),
        kind: ScenarioKind::MetzlerRandom {
            seed,
            gap,
            constructed_true,
            violation,
        },
        x,
        y,
        z,
        e,
        s,
        t,
        b,
        tolerance: MATRIX_TOL,
        sample_count: n + 4,
        sample_seed: seed,
    })
}

/// Heat flow on `[-extent, extent]^d` perturbed by a drift.
///
/// `S` is convolution with the Gauss–Weierstraß kernel, `T` is generated by
/// `Δ_h - Σ_j b_j ∂_j^-` (backward differences), and
/// `B = b_max Σ_j ∂_j^+` (forward differences). `drift[j]` holds the values
/// of `b_j` on the lattice nodes.
pub fn scenario_heat_drift(
    dim: usize,
    extent: f64,
    nodes: usize,
    drift: &[Vec<f64>],
    t_ref: f64,
) -> Result<Scenario> {
    if nodes < 16 {
        return Err(Error::Domain(format!(
            "need at least 16 nodes per axis, got {nodes}"
        )));
    }
    if !(t_ref > 0.0) {
        return Err(Error::Domain(format!(
            "reference time must be > 0, got {t_ref}"
        )));
    }
    let lattice = Lattice::new(dim, nodes, extent)?;
    let n = lattice.len();
    if drift.len() != dim || drift.iter().any(|b| b.len() != n) {
        return Err(Error::Dimension(format!(
            "drift needs {dim} components of length {n}"
        )));
    }
    if drift
        .iter()
        .flatten()
        .any(|b| !(*b >= 0.0) || !b.is_finite())
    {
        return Err(Error::Domain("drift values must be finite and >= 0".into()));
    }
    let b_max = drift.iter().flatten().copied().fold(0.0, f64::max);
    let mut a_t = lattice.laplacian();
    let mut b = Matrix::zeros(n, n);
    for (axis, bj) in drift.iter().enumerate() {
        let grad = Matrix::from_diag(bj).mul(&lattice.backward_difference(axis))?;
        a_t.axpy_in_place(-1.0, &grad);
        b.axpy_in_place(b_max, &lattice.forward_difference(axis));
    }
    let w = lattice.weights();
    let x = Arc::new(GridSpace::new("X", w, Exponent::Finite(2.0))?);
    let y = Arc::new(x.with_exponent("Y", Exponent::Infinity));
    let z = Arc::new(x.with_exponent("Z", Exponent::Finite(2.0)));
    let e = Arc::new(x.with_exponent("E", Exponent::Finite(1.0)));
    let s = SemigroupHandle::gauss_kernel("S", lattice, Arc::clone(&x))?;
    let t = SemigroupHandle::matrix_exp("T", a_t, Arc::clone(&x))?;
    Scenario::assemble(Parts {
        label: format!("heat-drift(d={dim}, nodes={nodes}, extent={extent}, t_ref={t_ref})"),
        kind: ScenarioKind::HeatDrift { dim, b_max },
        x,
        y,
        z,
        e,
        s,
        t,
        b,
        tolerance: KERNEL_TOL,
        sample_count: n + 4,
        sample_seed: 0,
    })
}

/// Rank-one perturbation `Bu = (∫ u dμ) 1` with `X = l_2`, `Y = l_∞`,
/// `Z = E = l_1` over the given weights.
pub fn scenario_rank_one_linfty(weights: &[f64], a_s: &Matrix, a_t: &Matrix) -> Result<Scenario> {
    require_metzler("A_S", a_s)?;
    require_metzler("A_T", a_t)?;
    let n = weights.len();
    let x = Arc::new(GridSpace::new(
        "X",
        weights.to_vec(),
        Exponent::Finite(2.0),
    )?);
    let y = Arc::new(x.with_exponent("Y", Exponent::Infinity));
    let z = Arc::new(x.with_exponent("Z", Exponent::Finite(1.0)));
    let e = Arc::new(x.with_exponent("E", Exponent::Finite(1.0)));
    let b = Matrix::from_fn(n, n, |_, l| weights[l]);
    let s = SemigroupHandle::matrix_exp("S", a_s.clone(), Arc::clone(&x))?;
    let t = SemigroupHandle::matrix_exp("T", a_t.clone(), Arc::clone(&x))?;
    Scenario::assemble(Parts {
        label: format!("rank-one-linfty(n={n})"),
        kind: ScenarioKind::RankOneLinfty,
        x,
        y,
        z,
        e,
        s,
        t,
        b,
        tolerance: MATRIX_TOL,
        sample_count: n + 4,
        sample_seed: 0,
    })
}

/// Rank-one perturbation `Bu = (∫ u g' dμ) f` with `X = l_2`, `Y = l_p`,
/// `Z = l_q`, `E = l_{p'}` over the weights of `f`'s space.
pub fn scenario_rank_one_lp(
    p: f64,
    q: f64,
    f: &Element,
    gprime: &Element,
    a_s: &Matrix,
    a_t: &Matrix,
) -> Result<Scenario> {
    for (name, r) in [("p", p), ("q", q)] {
        if !(r >= 1.0) || !r.is_finite() {
            return Err(Error::Domain(format!("{name} must lie in [1, ∞), got {r}")));
        }
    }
    if f.len() != gprime.len() {
        return Err(Error::Dimension("f and g' have different lengths".into()));
    }
    if f.values().iter().chain(gprime.values()).any(|v| *v < 0.0) {
        return Err(Error::Domain("f and g' must be nonnegative".into()));
    }
    require_metzler("A_S", a_s)?;
    require_metzler("A_T", a_t)?;
    let n = f.len();
    let weights = f.space().weights().to_vec();
    let x = Arc::new(GridSpace::new("X", weights.clone(), Exponent::Finite(2.0))?);
    let y = Arc::new(x.with_exponent("Y", Exponent::Finite(p)));
    let z = Arc::new(x.with_exponent("Z", Exponent::Finite(q)));
    let e = Arc::new(x.with_exponent("E", Exponent::Finite(p).conjugate()));
    let (fv, gv) = (f.values(), gprime.values());
    let b = Matrix::from_fn(n, n, |k, l| fv[k] * weights[l] * gv[l]);
    let s = SemigroupHandle::matrix_exp("S", a_s.clone(), Arc::clone(&x))?;
    let t = SemigroupHandle::matrix_exp("T", a_t.clone(), Arc::clone(&x))?;
    Scenario::assemble(Parts {
        label: format!("rank-one-lp(n={n}, p={p}, q={q})"),
        kind: ScenarioKind::RankOneLp { p, q },
        x,
        y,
        z,
        e,
        s,
        t,
        b,
        tolerance: MATRIX_TOL,
        sample_count: n + 4,
        sample_seed: 0,
    })
}

/// Delay equation `x' = A0 x + ∫ dη x_t` on `X_s = R^n` with `m` history
/// cells. `eta_density` and `rho` are scalar densities on the history nodes
/// `-1 + j/m`; `eta_density <= rho` is required.
pub fn scenario_delay(
    a0: &Matrix,
    eta_density: &[f64],
    rho: &[f64],
    p: f64,
    q: f64,
    m: usize,
) -> Result<Scenario> {
    if m < 4 {
        return Err(Error::Domain(format!(
            "need at least 4 history cells, got {m}"
        )));
    }
    if eta_density.len() != m || rho.len() != m {
        return Err(Error::Dimension(format!(
            "densities have lengths {} and {}, expected {m}",
            eta_density.len(),
            rho.len()
        )));
    }
    for (name, r) in [("p", p), ("q", q)] {
        if !(r >= 1.0) || !r.is_finite() {
            return Err(Error::Domain(format!("{name} must lie in [1, ∞), got {r}")));
        }
    }
    if let Some(j) = (0..m).find(|&j| !(eta_density[j] <= rho[j])) {
        return Err(Error::Domination(format!(
            "eta density {} exceeds rho {} at node {j}",
            eta_density[j], rho[j]
        )));
    }
    if !a0.is_square() {
        return Err(Error::Dimension("A0 must be square".into()));
    }
    let n = a0.rows();
    let size = n * (m + 1);
    let phi = scalar_history_functional(n, eta_density);
    let psi = scalar_history_functional(n, rho);
    let a_free = build_delay_generator(a0, &Matrix::zeros(n, n * m), m)?;
    let a_phi = build_delay_generator(a0, &phi, m)?;
    let mut b = Matrix::zeros(size, size);
    b.set_block(0, n, &psi);
    let mut b_tilde = Matrix::zeros(size, size);
    b_tilde.set_block(0, n, &phi);
    let w = delay_weights(n, m);
    let x = Arc::new(GridSpace::new("X", w, Exponent::Finite(p))?);
    let y = Arc::new(x.with_exponent("Y", Exponent::Finite(p)));
    let z = Arc::new(x.with_exponent("Z", Exponent::Finite(q)));
    let e = Arc::new(x.with_exponent("E", Exponent::Finite(p).conjugate()));
    let s = SemigroupHandle::delay_block("S", a_free, n, m, Arc::clone(&x))?;
    let t = SemigroupHandle::delay_block("T", a_phi, n, m, Arc::clone(&x))?;
    Scenario::assemble(Parts {
        label: format!("delay(n={n}, m={m}, p={p}, q={q})"),
        kind: ScenarioKind::Delay {
            head_dim: n,
            cells: m,
            b_tilde,
        },
        x,
        y,
        z,
        e,
        s,
        t,
        b,
        tolerance: MATRIX_TOL,
        sample_count: size + 4,
        sample_seed: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_instances_are_deterministic_and_well_formed() {
        for seed in 0..20 {
            let a = scenario_metzler_random(4, seed, 0.5).unwrap();
            let b = scenario_metzler_random(4, seed, 0.5).unwrap();
            assert_eq!(a.s.generator(), b.s.generator());
            assert_eq!(a.b, b.b);
            assert_eq!(a.kind, b.kind);
            assert!(a.s.generator().is_metzler() && a.t.generator().is_metzler());
            assert!(a.b.min_entry() >= 0.0);
            assert!(a.hypothesis.passed, "{:?}", a.hypothesis);
            let ones = vec![1.0; 4];
            for v in a.s.generator().mat_vec(&ones).unwrap() {
                assert!((v + 0.5).abs() < 1e-12);
            }
        }
        assert!(matches!(
            scenario_metzler_random(9, 0, 0.5),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            scenario_metzler_random(1, 0, 0.5),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn both_coin_outcomes_occur() {
        let flags: Vec<bool> = (0..16)
            .map(|s| {
                scenario_metzler_random(3, s, 0.5)
                    .unwrap()
                    .constructed_flag()
                    .unwrap()
            })
            .collect();
        assert!(flags.iter().any(|f| *f) && flags.iter().any(|f| !*f));
    }

    #[test]
    fn rank_one_linfty_maps_scaled_basis_to_ones() {
        let w = [0.5, 2.0, 1.0];
        let a = Matrix::from_diag(&[-1.0, -1.0, -1.0]);
        let scn = scenario_rank_one_linfty(&w, &a, &a).unwrap();
        for j in 0..3 {
            let mut u = vec![0.0; 3];
            u[j] = 1.0 / w[j];
            for v in scn.b.mat_vec(&u).unwrap() {
                assert!((v - 1.0).abs() < 1e-15);
            }
        }
        let bad = Matrix::from_rows(&[vec![-1.0, -0.1], vec![0.0, -1.0]]).unwrap();
        assert!(matches!(
            scenario_rank_one_linfty(&[1.0, 1.0], &bad, &bad),
            Err(Error::Positivity(_))
        ));
    }

    #[test]
    fn rank_one_lp_with_unit_data() {
        let sp = Arc::new(GridSpace::uniform("X", 4, Exponent::Finite(2.0)).unwrap());
        let one = sp.element(vec![1.0; 4]).unwrap();
        let a = Matrix::from_diag(&[-1.0; 4]);
        let scn = scenario_rank_one_lp(2.0, 3.0, &one, &one, &a, &a).unwrap();
        assert_eq!(scn.b.mat_vec(&[1.0; 4]).unwrap(), vec![4.0; 4]);
        assert_eq!(scn.e.exponent(), Exponent::Finite(2.0));
        let zero = sp.element(vec![0.0; 4]).unwrap();
        let scn0 = scenario_rank_one_lp(2.0, 3.0, &one, &zero, &a, &a).unwrap();
        assert_eq!(scn0.b.max_abs(), 0.0);
        let neg = sp.element(vec![1.0, -1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            scenario_rank_one_lp(2.0, 3.0, &neg, &one, &a, &a),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn delay_assembly_and_domination() {
        let a0 = Matrix::from_diag(&[-1.0]);
        let scn = scenario_delay(&a0, &[0.5; 6], &[1.0; 6], 2.0, 2.0, 6).unwrap();
        assert_eq!(scn.dim(), 7);
        let ScenarioKind::Delay { b_tilde, .. } = &scn.kind else {
            panic!("delay kind expected")
        };
        for i in 0..7 {
            for j in 0..7 {
                assert!(b_tilde[(i, j)] <= scn.b[(i, j)]);
            }
        }
        let diff = scn.t.generator().sub(scn.s.generator()).unwrap();
        assert_eq!(&diff, b_tilde);
        assert!(scn.hypothesis.passed);
        assert!(matches!(
            scenario_delay(&a0, &[1.5; 6], &[1.0; 6], 2.0, 2.0, 6),
            Err(Error::Domination(_))
        ));
        assert!(matches!(
            scenario_delay(&a0, &[0.0; 3], &[1.0; 3], 2.0, 2.0, 3),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn heat_scenario_without_drift() {
        let n = 33;
        let scn = scenario_heat_drift(1, 4.0, n, &[vec![0.0; n]], 0.1).unwrap();
        assert_eq!(scn.b.max_abs(), 0.0);
        assert_eq!(
            scn.t.generator(),
            &Lattice::new(1, n, 4.0).unwrap().laplacian()
        );
        assert!(scn.hypothesis.passed, "{:?}", scn.hypothesis);
        assert!(matches!(
            scenario_heat_drift(1, 4.0, n, &[vec![-1.0; n]], 0.1),
            Err(Error::Domain(_))
        ));
    }
}

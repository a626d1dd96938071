//! Eigenvalue certification for base graphs, lifts and twisted operators.

use faer::{Mat, Side};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{lift, signed_adjacency, signed_nonbacktracking, Graph, RegularGraph, Signing};
use crate::groups::CharacterIndex;

/// Largest dense matrix handed to an eigensolver.
pub const DENSE_GUARD: usize = 4096;
/// Absolute tolerance for multiset and inequality comparisons.
pub const SPECTRAL_TOL: f64 = 1e-8;

mod pairs {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let raw = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(raw.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    /// Sorted by descending modulus, ties by ascending argument.
    #[serde(with = "pairs")]
    pub eigenvalues: Vec<Complex64>,
    pub rho2: f64,
    /// `|λ₂|` when the input is an adjacency matrix.
    pub lambda: Option<f64>,
    /// Second-largest eigenvalue in signed order, for real spectra.
    pub second_signed: Option<f64>,
    pub tolerance: f64,
}

impl SpectralReport {
    fn from_eigenvalues(mut eigenvalues: Vec<Complex64>, adjacency: bool) -> Self {
        sort_by_modulus(&mut eigenvalues);
        let rho2 = eigenvalues.get(1).map_or(0.0, |z| z.norm());
        let real = eigenvalues.iter().all(|z| z.im.abs() <= 1e-9);
        let second_signed = real.then(|| {
            let mut re: Vec<f64> = eigenvalues.iter().map(|z| z.re).collect();
            re.sort_by(|a, b| b.total_cmp(a));
            re.get(1).copied().unwrap_or(f64::NAN)
        });
        Self {
            eigenvalues,
            rho2,
            lambda: adjacency.then_some(rho2),
            second_signed: second_signed.filter(|x| !x.is_nan()),
            tolerance: 1e-9,
        }
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.first().map_or(0.0, |z| z.norm())
    }
}

fn sort_by_modulus(v: &mut [Complex64]) {
    v.sort_by(|a, b| b.norm().total_cmp(&a.norm()).then(a.arg().total_cmp(&b.arg())));
}

fn guard(dim: usize) -> Result<()> {
    // results must not depend on the worker count
    static SEQUENTIAL: std::sync::Once = std::sync::Once::new();
    SEQUENTIAL.call_once(|| faer::set_global_parallelism(faer::Par::Seq));
    if dim > DENSE_GUARD {
        return Err(Error::DimensionGuard {
            dim,
            limit: DENSE_GUARD,
        });
    }
    Ok(())
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &Mat<Complex64>) -> Result<Vec<f64>> {
    guard(m.nrows())?;
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))
}

pub fn symmetric_eigenvalues(m: &Mat<f64>) -> Result<Vec<f64>> {
    guard(m.nrows())?;
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))
}

pub fn general_eigenvalues(m: &Mat<Complex64>) -> Result<Vec<Complex64>> {
    guard(m.nrows())?;
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    m.eigenvalues().map_err(|e| Error::Eigensolver(format!("{e:?}")))
}

/// Spectral norm of a Hermitian matrix.
pub fn hermitian_norm(m: &Mat<Complex64>) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?
        .into_iter()
        .fold(0.0, |acc, x| acc.max(x.abs())))
}

pub fn adjacency_report(g: &Graph) -> Result<SpectralReport> {
    let eig = symmetric_eigenvalues(&g.adjacency_matrix())?;
    Ok(SpectralReport::from_eigenvalues(
        eig.into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
        true,
    ))
}

/// `λ(G)`: second-largest modulus among adjacency eigenvalues.
pub fn lambda(g: &Graph) -> Result<f64> {
    Ok(adjacency_report(g)?.rho2)
}

pub fn signed_adjacency_report(base: &Graph, s: &Signing, chi: &CharacterIndex) -> Result<SpectralReport> {
    let a = signed_adjacency(base, s, chi)?;
    let eig = hermitian_eigenvalues(&a.matrix)?;
    Ok(SpectralReport::from_eigenvalues(
        eig.into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
        chi.is_trivial(),
    ))
}

pub fn nonbacktracking_report(base: &Graph, s: &Signing, chi: &CharacterIndex) -> Result<SpectralReport> {
    let b = signed_nonbacktracking(base, s, chi)?;
    Ok(SpectralReport::from_eigenvalues(general_eigenvalues(&b.matrix)?, false))
}

/// `ρ(A(χ))`.
pub fn signed_adjacency_radius(base: &Graph, s: &Signing, chi: &CharacterIndex) -> Result<f64> {
    hermitian_norm(&signed_adjacency(base, s, chi)?.matrix)
}

/// Largest distance in a greedy nearest-neighbor matching of two multisets.
///
/// Returns `inf` when the sizes differ. Every matching gives an upper bound
/// on the optimal bottleneck distance, so a small value is a certificate.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    sort_by_modulus(&mut a);
    sort_by_modulus(&mut b);
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for z in &a {
        let mut best = (f64::INFINITY, usize::MAX);
        for (j, w) in b.iter().enumerate() {
            if !used[j] {
                let dist = (z - w).norm();
                if dist < best.0 {
                    best = (dist, j);
                }
            }
        }
        used[best.1] = true;
        worst = worst.max(best.0);
    }
    worst
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnionReport {
    pub adjacency_distance: f64,
    pub nonbacktracking_distance: f64,
    pub characters: usize,
    pub tolerance: f64,
    pub pass: bool,
}

/// Compares the lifted spectrum with the union over characters (with
/// multiplicity) of the twisted spectra, for both `A` and `B`.
pub fn spectrum_union_check(base: &RegularGraph, s: &Signing) -> Result<UnionReport> {
    let group = s.group();
    let l = group.degree();
    guard(base.n() * l)?;
    guard(2 * base.num_edges() * l)?;
    let lifted = lift(base, s, true)?;
    let decomposition = group.decomposition();

    let lift_a: Vec<Complex64> = symmetric_eigenvalues(&lifted.adjacency_matrix())?
        .into_iter()
        .map(|x| Complex64::new(x, 0.0))
        .collect();
    let identity = Signing::identity(&lifted, crate::groups::AbelianGroupSpec::cyclic(1)?);
    let lift_b = general_eigenvalues(&signed_nonbacktracking(&lifted, &identity, &CharacterIndex(vec![0]))?.matrix)?;

    let parts: Vec<(Vec<Complex64>, Vec<Complex64>)> = decomposition
        .par_iter()
        .map(|(chi, mult)| -> Result<_> {
            let a: Vec<Complex64> = hermitian_eigenvalues(&signed_adjacency(base, s, chi)?.matrix)?
                .into_iter()
                .map(|x| Complex64::new(x, 0.0))
                .collect();
            let b = general_eigenvalues(&signed_nonbacktracking(base, s, chi)?.matrix)?;
            Ok((repeat(&a, *mult), repeat(&b, *mult)))
        })
        .collect::<Result<_>>()?;
    let union_a: Vec<Complex64> = parts.iter().flat_map(|p| p.0.iter().copied()).collect();
    let union_b: Vec<Complex64> = parts.iter().flat_map(|p| p.1.iter().copied()).collect();

    let adjacency_distance = multiset_distance(&lift_a, &union_a);
    let nonbacktracking_distance = multiset_distance(&lift_b, &union_b);
    Ok(UnionReport {
        adjacency_distance,
        nonbacktracking_distance,
        characters: decomposition.len(),
        tolerance: SPECTRAL_TOL,
        pass: adjacency_distance <= SPECTRAL_TOL && nonbacktracking_distance <= SPECTRAL_TOL,
    })
}

fn repeat(v: &[Complex64], times: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(v.len() * times);
    for _ in 0..times {
        out.extend_from_slice(v);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IharaReport {
    /// `λ(G)` for the trivial character, `ρ(A(χ))` otherwise.
    pub lhs: f64,
    /// `ρ₂(B)` for the trivial character, `ρ(B(χ))` otherwise.
    pub rho_b: f64,
    pub bound: f64,
    pub slack: f64,
    pub pass: bool,
}

/// Checks `lhs ≤ 2·max{√(d−1), rho_b}`.
pub fn ihara_check(base: &RegularGraph, s: &Signing, chi: &CharacterIndex) -> Result<IharaReport> {
    let a = signed_adjacency_report(base, s, chi)?;
    let b = nonbacktracking_report(base, s, chi)?;
    let (lhs, rho_b) = if chi.is_trivial() {
        (a.rho2, b.rho2)
    } else {
        (a.spectral_radius(), b.spectral_radius())
    };
    let d = base.d() as f64;
    let bound = 2.0 * (d - 1.0).max(0.0).sqrt().max(rho_b);
    let slack = bound - lhs;
    Ok(IharaReport {
        lhs,
        rho_b,
        bound,
        slack,
        pass: slack >= -SPECTRAL_TOL,
    })
}

/// Which root of `β² − αβ + (d−1) = 0` to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BetaRoot {
    #[default]
    Larger,
    Smaller,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportResult {
    /// Indexed by directed edge.
    #[serde(with = "pairs")]
    pub g: Vec<Complex64>,
    #[serde(with = "crate::spectral::single")]
    pub beta: Complex64,
    pub residual: f64,
    pub tolerance: f64,
    pub double_root: bool,
}

mod single {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

/// Lifts an eigenvector `f` of `A(χ)` (eigenvalue `α`) to an eigenvector of
/// `B(χ)` with eigenvalue `β`.
pub fn nb_eigenvector_transport(
    base: &RegularGraph,
    s: &Signing,
    chi: &CharacterIndex,
    f: &[Complex64],
    alpha: Complex64,
    root: BetaRoot,
) -> Result<TransportResult> {
    let n = base.n();
    if f.len() != n {
        return Err(Error::Shape(format!("vector of length {} for {n} vertices", f.len())));
    }
    let a = signed_adjacency(base, s, chi)?.matrix;
    let fnorm = inf_norm(f);
    let mut eig_residual = 0.0f64;
    for u in 0..n {
        let af: Complex64 = base.neighbors(u).iter().map(|&v| a[(u, v)] * f[v]).sum();
        eig_residual = eig_residual.max((af - alpha * f[u]).norm());
    }
    if fnorm == 0.0 || eig_residual > SPECTRAL_TOL * fnorm.max(1.0) {
        return Err(Error::NotEigenvector(eig_residual));
    }

    let dm1 = Complex64::new(base.d() as f64 - 1.0, 0.0);
    let disc_sq = alpha * alpha - 4.0 * dm1;
    let disc = disc_sq.sqrt();
    let (b1, b2) = ((alpha + disc) / 2.0, (alpha - disc) / 2.0);
    let (big, small) = if b1.norm() > b2.norm() || (b1.norm() == b2.norm() && b1.im >= b2.im) {
        (b1, b2)
    } else {
        (b2, b1)
    };
    let beta = match root {
        BetaRoot::Larger => big,
        BetaRoot::Smaller => small,
    };
    let double_root = disc_sq.norm() <= 1e-9 * (1.0 + dm1.re);

    let m = base.num_edges();
    let mut g = vec![Complex64::new(0.0, 0.0); 2 * m];
    for (idx, slot) in g.iter_mut().enumerate() {
        let (u, v) = base.directed_edge(idx);
        let auv = a[(u, v)];
        *slot = (f[u] - beta * auv * f[v]) / auv;
    }
    let gnorm = inf_norm(&g);
    if gnorm <= 1e-12 * fnorm {
        return Err(Error::DegenerateTransport);
    }
    let mut residual = 0.0f64;
    for (idx, &gi) in g.iter().enumerate() {
        let (u, v) = base.directed_edge(idx);
        let bg: Complex64 = base
            .neighbors(v)
            .iter()
            .filter(|&&y| y != u)
            .map(|&y| a[(v, y)] * g[base.directed_index(v, y).unwrap()])
            .sum();
        residual = residual.max((bg - beta * gi).norm());
    }
    Ok(TransportResult {
        g,
        beta,
        residual: residual / gnorm,
        tolerance: if double_root { 1e-5 } else { 1e-7 },
        double_root,
    })
}

fn inf_norm(v: &[Complex64]) -> f64 {
    v.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Eigenpairs of a Hermitian matrix: ascending eigenvalues and column eigenvectors.
pub fn hermitian_eigenpairs(m: &Mat<Complex64>) -> Result<(Vec<f64>, Vec<Vec<Complex64>>)> {
    guard(m.nrows())?;
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let n = m.nrows();
    let s = evd.S().column_vector();
    let u = evd.U();
    let values = (0..n).map(|i| s[i].re).collect();
    let vectors = (0..n).map(|j| (0..n).map(|i| u[(i, j)]).collect()).collect();
    Ok((values, vectors))
}

/// Real and imaginary parts `C`, `D` of `A = C + iD`.
pub fn real_imag_parts(m: &Mat<Complex64>) -> (Mat<f64>, Mat<f64>) {
    (
        Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].re),
        Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].im),
    )
}

/// Spectral norm of a real matrix that is symmetric or antisymmetric.
pub fn real_normal_norm(m: &Mat<f64>) -> Result<f64> {
    let symmetric = (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| m[(i, j)] == m[(j, i)]));
    if symmetric {
        return Ok(symmetric_eigenvalues(m)?
            .into_iter()
            .fold(0.0, |acc, x| acc.max(x.abs())));
    }
    // iD is Hermitian when D is antisymmetric
    let h = Mat::from_fn(m.nrows(), m.ncols(), |i, j| Complex64::new(0.0, m[(i, j)]));
    hermitian_norm(&h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RayleighMode {
    Exhaustive,
    Sampled { trials: usize, seed: u64 },
}

/// Maximum boolean Rayleigh quotient `|uᵀMv| / (‖u‖‖v‖)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayleighResult {
    pub value: f64,
    pub u: Vec<usize>,
    pub v: Vec<usize>,
    /// `false` for sampled runs, whose value is only a lower bound.
    pub exact: bool,
}

pub const RAYLEIGH_EXHAUSTIVE_LIMIT: usize = 20;

/// Maximum over disjoint nonempty supports `u`, `v` of `|uᵀMv| / √(|u||v|)`.
///
/// For a fixed `u` the best `v` of each size takes the largest (or smallest)
/// entries of `Mᵀu` outside `u`, so exhaustive mode enumerates only `u`.
pub fn boolean_rayleigh_max(m: &Mat<f64>, mode: RayleighMode) -> Result<RayleighResult> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::Shape("matrix must be square".into()));
    }
    match mode {
        RayleighMode::Exhaustive => {
            if n > RAYLEIGH_EXHAUSTIVE_LIMIT {
                return Err(Error::EnumerationGuard(format!(
                    "exhaustive Rayleigh search needs n <= {RAYLEIGH_EXHAUSTIVE_LIMIT}, got {n}"
                )));
            }
            let best = (1u64..(1u64 << n))
                .into_par_iter()
                .filter(|mask| mask.count_ones() < n as u32)
                .map(|mask| {
                    let u: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
                    best_partner(m, &u)
                })
                .reduce(|| (0.0, Vec::new(), Vec::new()), pick_best);
            Ok(RayleighResult {
                value: best.0,
                u: best.1,
                v: best.2,
                exact: true,
            })
        }
        RayleighMode::Sampled { trials, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut best = (0.0, Vec::new(), Vec::new());
            if n >= 2 {
                for _ in 0..trials {
                    let mut u: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
                    if u.is_empty() {
                        u.push(rng.gen_range(0..n));
                    }
                    if u.len() == n {
                        u.pop();
                    }
                    best = pick_best(best, best_partner(m, &u));
                }
            }
            Ok(RayleighResult {
                value: best.0,
                u: best.1,
                v: best.2,
                exact: false,
            })
        }
    }
}

type Candidate = (f64, Vec<usize>, Vec<usize>);

fn pick_best(a: Candidate, b: Candidate) -> Candidate {
    if b.0 > a.0 {
        b
    } else {
        a
    }
}

fn best_partner(m: &Mat<f64>, u: &[usize]) -> Candidate {
    let n = m.nrows();
    let mut in_u = vec![false; n];
    for &i in u {
        in_u[i] = true;
    }
    let mut w: Vec<(f64, usize)> = (0..n)
        .filter(|&j| !in_u[j])
        .map(|j| (u.iter().map(|&i| m[(i, j)]).sum(), j))
        .collect();
    w.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let su = (u.len() as f64).sqrt();
    let mut best: Candidate = (0.0, Vec::new(), Vec::new());
    let (mut top, mut bottom) = (0.0, 0.0);
    let len = w.len();
    for k in 1..=len {
        top += w[k - 1].0;
        bottom += w[len - k].0;
        let denom = su * (k as f64).sqrt();
        let (val, from_top) = if top.abs() >= bottom.abs() {
            (top.abs() / denom, true)
        } else {
            (bottom.abs() / denom, false)
        };
        if val > best.0 {
            let mut v: Vec<usize> = if from_top {
                w[..k].iter().map(|p| p.1).collect()
            } else {
                w[len - k..].iter().map(|p| p.1).collect()
            };
            v.sort_unstable();
            best = (val, u.to_vec(), v);
        }
    }
    best
}

/// `|uᵀMv| / (‖u‖‖v‖)` for explicit supports.
pub fn boolean_rayleigh(m: &Mat<f64>, u: &[usize], v: &[usize]) -> f64 {
    let total: f64 = u.iter().flat_map(|&i| v.iter().map(move |&j| m[(i, j)])).sum();
    total.abs() / ((u.len() * v.len()) as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingReport {
    pub e_st: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// Expander mixing check with `e(S,T) = 1_Sᵀ A 1_T`.
pub fn mixing_check(g: &RegularGraph, s_set: &[usize], t_set: &[usize]) -> Result<MixingReport> {
    let lam = lambda(g)?;
    mixing_check_with_lambda(g, lam, s_set, t_set)
}

pub fn mixing_check_with_lambda(g: &RegularGraph, lam: f64, s_set: &[usize], t_set: &[usize]) -> Result<MixingReport> {
    let n = g.n();
    let mut in_t = vec![false; n];
    for &t in t_set {
        if t >= n {
            return Err(Error::Shape(format!("vertex {t} out of range")));
        }
        in_t[t] = true;
    }
    let mut e_st = 0;
    for &s in s_set {
        if s >= n {
            return Err(Error::Shape(format!("vertex {s} out of range")));
        }
        e_st += g.neighbors(s).iter().filter(|&&x| in_t[x]).count();
    }
    let (sl, tl) = (s_set.len() as f64, t_set.len() as f64);
    let lhs = (e_st as f64 - g.d() as f64 * sl * tl / n as f64).abs();
    let rhs = lam * (sl * tl).sqrt();
    Ok(MixingReport {
        e_st,
        lhs,
        rhs,
        pass: lhs <= rhs + SPECTRAL_TOL,
    })
}

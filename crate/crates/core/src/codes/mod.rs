//! Tanner codes on lifts, lifted-product CSS codes and desk-scale distances.

mod f2;
mod ring;

pub use f2::{BitMatrix, BitVec, Rref};
pub use ring::{GroupAlgebraJson, GroupAlgebraMatrix, Poly};

use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{Graph, RegularGraph, Signing};
use crate::groups::{AbelianGroupSpec, GroupElement};
use crate::search::LiftCertificate;

/// Largest code (or logical-space) dimension enumerated exhaustively.
pub const EXACT_DIM_GUARD: usize = 24;
/// Largest local code length accepted by [`local_code_search`].
pub const LOCAL_CODE_GUARD: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum DistanceMode {
    Exact,
    InformationSet { trials: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Distance {
    /// `exact` or `information-set-upper-bound`.
    pub mode: String,
    /// `None` when there is no nonzero codeword or logical operator.
    pub value: Option<usize>,
}

impl Distance {
    fn new(mode: DistanceMode, value: Option<usize>) -> Self {
        let mode = match mode {
            DistanceMode::Exact => "exact",
            DistanceMode::InformationSet { .. } => "information-set-upper-bound",
        };
        Distance {
            mode: mode.into(),
            value,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.mode == "exact"
    }
}

fn min_opt(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Minimum weight over combinations of `basis` whose coefficients on the last
/// `protected` vectors are not all zero.
fn enumerate_min_weight(basis: &[BitVec], protected: usize) -> Option<usize> {
    let dim = basis.len();
    if protected == 0 || dim == 0 {
        return None;
    }
    let split = dim.min(10);
    let low = dim - split;
    let shift = dim - protected;
    (0u64..1 << split)
        .into_par_iter()
        .filter_map(|prefix| {
            let base_index = prefix << low;
            if protected <= split && (base_index >> shift) == 0 {
                return None;
            }
            let mut v = BitVec::zeros(basis[0].len());
            for b in 0..split {
                if prefix >> b & 1 == 1 {
                    v.xor_assign(&basis[low + b]);
                }
            }
            let mut best = usize::MAX;
            let mut gray = 0u64;
            if (base_index >> shift) != 0 {
                best = v.weight();
            }
            for step in 1u64..1 << low {
                let bit = step.trailing_zeros() as usize;
                v.xor_assign(&basis[bit]);
                gray ^= 1 << bit;
                if ((base_index | gray) >> shift) != 0 {
                    best = best.min(v.weight());
                }
            }
            (best != usize::MAX).then_some(best)
        })
        .min()
}

/// Splits `ker` into a basis of `span(stabilizers)` followed by coset representatives.
fn stabilizer_logical_basis(stabilizers: &BitMatrix, ker: &BitMatrix) -> (Vec<BitVec>, usize) {
    let mut echelon: Vec<(usize, BitVec)> = Vec::new();
    let reduce = |v: &BitVec, echelon: &mut Vec<(usize, BitVec)>| -> bool {
        let mut v = v.clone();
        for (p, row) in echelon.iter() {
            if v.get(*p) {
                v.xor_assign(row);
            }
        }
        match v.first_one() {
            Some(p) => {
                echelon.push((p, v));
                true
            }
            None => false,
        }
    };
    let mut basis = Vec::new();
    for s in stabilizers.row_basis().rows() {
        reduce(s, &mut echelon);
        basis.push(s.clone());
    }
    let mut logical = 0;
    for v in ker.rows() {
        if reduce(v, &mut echelon) {
            basis.push(v.clone());
            logical += 1;
        }
    }
    (basis, logical)
}

/// Lightest nontrivial vector found by random information sets: rows of the
/// reduced generator and their pairwise sums.
fn information_set_search(generator: &BitMatrix, trivial: Option<&Rref>, trials: usize, seed: u64) -> Option<usize> {
    let n = generator.num_cols();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<usize> = None;
    let nontrivial = |v: &BitVec| !v.is_zero() && trivial.is_none_or(|t| !t.contains(v));
    for _ in 0..trials {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let mut inverse = vec![0; n];
        for (i, &p) in perm.iter().enumerate() {
            inverse[p] = i;
        }
        let reduced = generator.permute_columns(&perm).rref().matrix;
        let rows = reduced.rows();
        let mut consider = |v: BitVec| {
            let w = v.weight();
            if best.is_none_or(|b| w < b) && nontrivial(&v.permuted(&inverse)) {
                best = Some(w);
            }
        };
        for (i, r) in rows.iter().enumerate() {
            consider(r.clone());
            for s in &rows[i + 1..] {
                let mut v = r.clone();
                v.xor_assign(s);
                consider(v);
            }
        }
    }
    best
}

/// A binary linear code given by its parity matrix.
#[derive(Debug, Clone)]
pub struct LinearCodeF2 {
    parity: BitMatrix,
    generator: BitMatrix,
    distance: OnceLock<Option<usize>>,
}

impl LinearCodeF2 {
    pub fn from_parity(parity: BitMatrix) -> Self {
        let generator = parity.kernel();
        LinearCodeF2 {
            parity,
            generator,
            distance: OnceLock::new(),
        }
    }

    pub fn from_generator(generator: &BitMatrix) -> Self {
        LinearCodeF2::from_parity(generator.kernel())
    }

    pub fn repetition(n: usize) -> Self {
        let mut h = BitMatrix::zeros(n.saturating_sub(1), n);
        for i in 0..n.saturating_sub(1) {
            h.set(i, i, true);
            h.set(i, i + 1, true);
        }
        LinearCodeF2::from_parity(h)
    }

    pub fn even_weight(n: usize) -> Self {
        LinearCodeF2::from_parity(
            BitMatrix::from_rows(n, vec![BitVec::from_support(n, &(0..n).collect::<Vec<_>>())]).unwrap(),
        )
    }

    pub fn full_space(n: usize) -> Self {
        LinearCodeF2::from_parity(BitMatrix::zeros(0, n))
    }

    pub fn hamming_7_4() -> Self {
        let h = BitMatrix::from_dense(
            7,
            &[
                vec![1, 0, 1, 0, 1, 0, 1],
                vec![0, 1, 1, 0, 0, 1, 1],
                vec![0, 0, 0, 1, 1, 1, 1],
            ],
        )
        .unwrap();
        LinearCodeF2::from_parity(h)
    }

    pub fn length(&self) -> usize {
        self.parity.num_cols()
    }

    pub fn dimension(&self) -> usize {
        self.generator.num_rows()
    }

    pub fn parity(&self) -> &BitMatrix {
        &self.parity
    }

    pub fn generator(&self) -> &BitMatrix {
        &self.generator
    }

    pub fn dual(&self) -> LinearCodeF2 {
        LinearCodeF2::from_parity(self.generator.clone())
    }

    pub fn contains(&self, word: &BitVec) -> bool {
        self.parity.rows().iter().all(|h| !h.dot(word))
    }

    pub fn min_distance(&self, mode: DistanceMode) -> Result<Distance> {
        let value = match mode {
            DistanceMode::Exact => {
                if let Some(&d) = self.distance.get() {
                    d
                } else {
                    let k = self.dimension();
                    if k > EXACT_DIM_GUARD {
                        return Err(Error::EnumerationGuard(format!(
                            "dimension {k} exceeds {EXACT_DIM_GUARD}"
                        )));
                    }
                    let d = enumerate_min_weight(self.generator.rows(), k);
                    *self.distance.get_or_init(|| d)
                }
            }
            DistanceMode::InformationSet { trials, seed } => {
                information_set_search(&self.generator, None, trials, seed)
            }
        };
        Ok(Distance::new(mode, value))
    }
}

/// A CSS code: `H_X · H_Zᵀ = 0` is required for validity but not enforced here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CSSCode {
    pub n: usize,
    pub hx: BitMatrix,
    pub hz: BitMatrix,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CSSJson {
    pub n: usize,
    #[serde(rename = "H_X")]
    pub hx: Vec<String>,
    #[serde(rename = "H_Z")]
    pub hz: Vec<String>,
    pub k: usize,
    pub distance: Option<Distance>,
}

impl CSSCode {
    pub fn new(hx: BitMatrix, hz: BitMatrix) -> Result<Self> {
        if hx.num_cols() != hz.num_cols() {
            return Err(Error::Shape(format!(
                "H_X has {} columns, H_Z has {}",
                hx.num_cols(),
                hz.num_cols()
            )));
        }
        Ok(CSSCode {
            n: hx.num_cols(),
            hx,
            hz,
        })
    }

    /// Largest row and column weight over both check matrices.
    pub fn max_weights(&self) -> (usize, usize) {
        (
            self.hx.max_row_weight().max(self.hz.max_row_weight()),
            self.hx.max_col_weight().max(self.hz.max_col_weight()),
        )
    }

    pub fn is_ldpc(&self, threshold: usize) -> bool {
        let (r, c) = self.max_weights();
        r <= threshold && c <= threshold
    }

    /// Lightest Z-type logical: `ker H_X \ rowspace H_Z`.
    pub fn z_distance(&self, mode: DistanceMode) -> Result<Option<usize>> {
        logical_weight(&self.hx, &self.hz, mode)
    }

    /// Lightest X-type logical: `ker H_Z \ rowspace H_X`.
    pub fn x_distance(&self, mode: DistanceMode) -> Result<Option<usize>> {
        logical_weight(&self.hz, &self.hx, mode)
    }

    pub fn min_distance(&self, mode: DistanceMode) -> Result<Distance> {
        let dx = self.x_distance(mode)?;
        let dz = self.z_distance(mode)?;
        Ok(Distance::new(mode, min_opt(dx, dz)))
    }

    pub fn to_json(&self, distance: Option<Distance>) -> CSSJson {
        CSSJson {
            n: self.n,
            hx: self.hx.to_hex_rows(),
            hz: self.hz.to_hex_rows(),
            k: code_dimension(self),
            distance,
        }
    }

    pub fn from_json(j: &CSSJson) -> Result<Self> {
        let code = CSSCode::new(
            BitMatrix::from_hex_rows(j.n, &j.hx)?,
            BitMatrix::from_hex_rows(j.n, &j.hz)?,
        )?;
        if code_dimension(&code) != j.k {
            return Err(Error::Parse(format!("stored k = {} disagrees with the matrices", j.k)));
        }
        Ok(code)
    }
}

fn logical_weight(checks: &BitMatrix, stabilizers: &BitMatrix, mode: DistanceMode) -> Result<Option<usize>> {
    let ker = checks.kernel();
    match mode {
        DistanceMode::Exact => {
            let (basis, logical) = stabilizer_logical_basis(stabilizers, &ker);
            if basis.len() > EXACT_DIM_GUARD {
                return Err(Error::EnumerationGuard(format!(
                    "kernel dimension {} exceeds {EXACT_DIM_GUARD}",
                    basis.len()
                )));
            }
            Ok(enumerate_min_weight(&basis, logical))
        }
        DistanceMode::InformationSet { trials, seed } => {
            let rref = stabilizers.rref();
            Ok(information_set_search(&ker, Some(&rref), trials, seed))
        }
    }
}

pub fn css_valid(code: &CSSCode) -> bool {
    code.hx.num_cols() == code.hz.num_cols() && code.hx.mul_transpose(&code.hz).is_ok_and(|m| m.is_zero())
}

pub fn rank_f2(m: &BitMatrix) -> usize {
    m.rank()
}

/// `k = n − rank H_X − rank H_Z`.
pub fn code_dimension(code: &CSSCode) -> usize {
    code.n - code.hx.rank() - code.hz.rank()
}

/// Lifted product of two ring matrices: each is expanded to its circulant
/// binary matrix and the pair is combined as a hypergraph product, so the
/// toric family arises from `A = B = [1+x]`.
pub fn lifted_product(a: &GroupAlgebraMatrix, b: &GroupAlgebraMatrix) -> Result<CSSCode> {
    if a.modulus() != b.modulus() {
        return Err(Error::GroupMismatch);
    }
    let (ab, bb) = (a.expand(), b.expand());
    let (ma, na) = (ab.num_rows(), ab.num_cols());
    let (mb, nb) = (bb.num_rows(), bb.num_cols());
    let hx = ab
        .kron(&BitMatrix::identity(nb))
        .hstack(&BitMatrix::identity(ma).kron(&bb.transpose()))?;
    let hz = BitMatrix::identity(na)
        .kron(&bb)
        .hstack(&ab.transpose().kron(&BitMatrix::identity(mb)))?;
    CSSCode::new(hx, hz)
}

/// Lifted product taken inside the ring before expansion:
/// `H_X = [A⊗I | I⊗B*]`, `H_Z = [I⊗B | A*⊗I]`.
pub fn lifted_product_ring(a: &GroupAlgebraMatrix, b: &GroupAlgebraMatrix) -> Result<CSSCode> {
    let l = a.modulus();
    if l != b.modulus() {
        return Err(Error::GroupMismatch);
    }
    let (ma, na) = a.shape();
    let (mb, nb) = b.shape();
    let id = |n| GroupAlgebraMatrix::identity(l, n);
    let hx = a.kron(&id(nb)?)?.hstack(&id(ma)?.kron(&b.conj_transpose())?)?;
    let hz = id(na)?.kron(b)?.hstack(&a.conj_transpose().kron(&id(mb)?)?)?;
    CSSCode::new(hx.expand(), hz.expand())
}

/// Tanner parity: each row of a row-reduced `C0` parity is imposed on every
/// vertex's incident edges in neighbor order. Rows are vertex-major.
pub fn tanner_code(g: &Graph, c0: &LinearCodeF2) -> Result<BitMatrix> {
    let d = g
        .is_regular()
        .ok_or_else(|| Error::InvalidGraph("Tanner codes need a regular graph".into()))?;
    if c0.length() != d {
        return Err(Error::Shape(format!(
            "local code has length {}, degree is {d}",
            c0.length()
        )));
    }
    let local = c0.parity().row_basis();
    let m = g.num_edges();
    let mut rows = Vec::with_capacity(g.n() * local.num_rows());
    for v in 0..g.n() {
        for h in local.rows() {
            let support: Vec<usize> = h.support().into_iter().map(|j| g.slot_edge(v, j)).collect();
            rows.push(BitVec::from_support(m, &support));
        }
    }
    BitMatrix::from_rows(m, rows)
}

/// Base matrix over `F2[x]/(x^ℓ − 1)` whose expansion spans the Tanner parity
/// of the cyclic lift: an edge `u < v` with value `s` contributes `1` at
/// its `u` end and `x^s` at its `v` end.
pub fn tanner_base_matrix(base: &RegularGraph, s: &Signing, c0: &LinearCodeF2) -> Result<GroupAlgebraMatrix> {
    let group = s.group();
    let [l] = group.factors() else {
        return Err(Error::InvalidGroup("base matrices need a cyclic group".into()));
    };
    if group.degree() != *l as usize {
        return Err(Error::InvalidGroup(
            "base matrices need the regular cyclic action".into(),
        ));
    }
    if c0.length() != base.d() {
        return Err(Error::Shape(format!(
            "local code has length {}, degree is {}",
            c0.length(),
            base.d()
        )));
    }
    let local = c0.parity().row_basis();
    let r = local.num_rows();
    let mut m = GroupAlgebraMatrix::zeros(*l, base.n() * r, base.num_edges())?;
    for v in 0..base.n() {
        for (t, h) in local.rows().iter().enumerate() {
            for j in h.support() {
                let e = base.slot_edge(v, j);
                let (u, _) = base.edges()[e];
                let a = if v == u { 0 } else { s.values()[e].0[0] };
                let entry = m.get(v * r + t, e).add(&Poly::monomial(a, *l));
                m.set(v * r + t, e, entry);
            }
        }
    }
    Ok(m)
}

/// Columns grouped in contiguous blocks of size `block`, with the group acting
/// inside every block by the given permutations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockLayout {
    pub block: usize,
    pub generators: Vec<Vec<usize>>,
}

impl BlockLayout {
    pub fn cyclic(l: usize) -> Self {
        BlockLayout {
            block: l,
            generators: vec![(0..l).map(|i| (i + 1) % l).collect()],
        }
    }

    pub fn from_group(group: &AbelianGroupSpec) -> Self {
        let k = group.factors().len();
        let generators = (0..k)
            .map(|j| {
                let mut e = vec![0; k];
                e[j] = 1;
                group.permutation(&GroupElement(e)).to_vec()
            })
            .collect();
        BlockLayout {
            block: group.degree(),
            generators,
        }
    }

    fn column_permutation(&self, perm: &[usize], cols: usize) -> Vec<usize> {
        (0..cols)
            .map(|c| (c / self.block) * self.block + perm[c % self.block])
            .collect()
    }
}

/// True iff acting on every column block by each generator preserves the row space.
pub fn circulant_structure_check(h: &BitMatrix, layout: &BlockLayout) -> Result<bool> {
    if layout.block == 0 || !h.num_cols().is_multiple_of(layout.block) {
        return Err(Error::Shape(format!(
            "{} columns do not split into blocks of {}",
            h.num_cols(),
            layout.block
        )));
    }
    if layout.generators.iter().any(|p| p.len() != layout.block) {
        return Err(Error::Shape("generator permutation has the wrong size".into()));
    }
    Ok(layout.generators.iter().all(|p| {
        let shifted = h.permute_columns(&layout.column_permutation(p, h.num_cols()));
        shifted.same_row_space(h)
    }))
}

/// Tanner parity on the lift a certificate describes, with its block layout.
pub fn tanner_from_certificate(cert: &LiftCertificate, c0: &LinearCodeF2) -> Result<(BitMatrix, BlockLayout)> {
    let lifted = cert.lifted_graph()?;
    let group = AbelianGroupSpec::from_descriptor(&cert.signing.group)?;
    Ok((tanner_code(&lifted, c0)?, BlockLayout::from_group(&group)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedEdge {
    pub element: usize,
    pub base_edge: usize,
    pub fiber: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeActionReport {
    pub vertices_free: bool,
    pub edges_free: bool,
    pub fixed_edges: Vec<FixedEdge>,
}

impl FreeActionReport {
    pub fn pass(&self) -> bool {
        self.vertices_free && self.edges_free
    }
}

/// Fiber-shift action on the lift of raw base edges `(u, v, s)`; self-loops are allowed.
pub fn free_action_on_edges(group: &AbelianGroupSpec, edges: &[(usize, usize, GroupElement)]) -> FreeActionReport {
    let l = group.degree();
    let mut vertices_free = true;
    let mut fixed_edges = Vec::new();
    for (hi, h) in group.elements().enumerate().skip(1) {
        let ph = group.permutation(&h);
        if (0..l).any(|i| ph[i] == i) {
            vertices_free = false;
        }
        for (e, (u, v, s)) in edges.iter().enumerate() {
            let ps = group.permutation(s);
            for i in 0..l {
                let a = ((*u, i), (*v, ps[i]));
                let b = ((*u, ph[i]), (*v, ph[ps[i]]));
                let norm = |(x, y): ((usize, usize), (usize, usize))| if x <= y { (x, y) } else { (y, x) };
                if norm(a) == norm(b) {
                    fixed_edges.push(FixedEdge {
                        element: hi,
                        base_edge: e,
                        fiber: i,
                    });
                }
            }
        }
    }
    FreeActionReport {
        vertices_free,
        edges_free: fixed_edges.is_empty(),
        fixed_edges,
    }
}

pub fn free_action_check(cert: &LiftCertificate) -> Result<FreeActionReport> {
    let base = cert.base_graph()?;
    let s = cert.signing_for(&base)?;
    let edges: Vec<_> = base
        .edges()
        .iter()
        .zip(s.values())
        .map(|(&(u, v), g)| (u, v, g.clone()))
        .collect();
    Ok(free_action_on_edges(s.group(), &edges))
}

/// Random full-rank generators of length `d`, verified by exact distance of
/// the code and its dual; returns the first meeting both targets.
pub fn local_code_search(
    d: usize,
    target_distance: usize,
    target_dual_distance: usize,
    budget: usize,
    seed: u64,
) -> Result<LinearCodeF2> {
    if !(2..=LOCAL_CODE_GUARD).contains(&d) {
        return Err(Error::EnumerationGuard(format!(
            "local length {d} outside 2..={LOCAL_CODE_GUARD}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..budget {
        let k = rng.gen_range(1..d);
        let g = BitMatrix::random(k, d, &mut rng);
        if g.rank() < k {
            continue;
        }
        let code = LinearCodeF2::from_generator(&g);
        let meets = |c: &LinearCodeF2, t: usize| {
            c.min_distance(DistanceMode::Exact)
                .is_ok_and(|dist| dist.value.is_some_and(|v| v >= t))
        };
        if meets(&code, target_distance) && meets(&code.dual(), target_dual_distance) {
            return Ok(code);
        }
    }
    Err(Error::BudgetExhausted(format!(
        "no [{d}, k] code with distance ≥ {target_distance} and dual distance ≥ {target_dual_distance} in {budget} trials"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{lift, random_regular};
    use crate::pseudorandom::SigningDistribution;
    use crate::search::derandomized_lift_search;

    fn one_plus_x(l: u32) -> GroupAlgebraMatrix {
        GroupAlgebraMatrix::parse(l, &[vec!["1+x"]]).unwrap()
    }

    #[test]
    fn classical_distances() {
        let rep = LinearCodeF2::repetition(3);
        assert_eq!(rep.dimension(), 1);
        assert_eq!(rep.min_distance(DistanceMode::Exact).unwrap().value, Some(3));
        let ham = LinearCodeF2::hamming_7_4();
        assert_eq!(ham.dimension(), 4);
        assert_eq!(ham.min_distance(DistanceMode::Exact).unwrap().value, Some(3));
        assert_eq!(ham.dual().min_distance(DistanceMode::Exact).unwrap().value, Some(4));
        let is = ham
            .min_distance(DistanceMode::InformationSet { trials: 10, seed: 1 })
            .unwrap();
        assert_eq!(is.value, Some(3));
        assert!(!is.is_exact());
        assert_eq!(
            LinearCodeF2::even_weight(4)
                .min_distance(DistanceMode::Exact)
                .unwrap()
                .value,
            Some(2)
        );
    }

    #[test]
    fn toric_family() {
        for (l, n, d) in [(2u32, 8usize, 2usize), (3, 18, 3), (4, 32, 4)] {
            let code = lifted_product(&one_plus_x(l), &one_plus_x(l)).unwrap();
            assert!(css_valid(&code));
            assert_eq!(code.n, n);
            assert_eq!(code_dimension(&code), 2);
            assert_eq!(code.min_distance(DistanceMode::Exact).unwrap().value, Some(d));
        }
        let code = lifted_product(&one_plus_x(2), &one_plus_x(2)).unwrap();
        assert_eq!((code.hx.rank(), code.hz.rank()), (3, 3));
    }

    #[test]
    fn degenerate_ring() {
        let one = GroupAlgebraMatrix::parse(1, &[vec!["1"]]).unwrap();
        let code = lifted_product(&one, &one).unwrap();
        let row = BitMatrix::from_dense(2, &[vec![1, 1]]).unwrap();
        assert_eq!(code.hx, row);
        assert_eq!(code.hz, row);
        assert_eq!(code_dimension(&code), 0);
        assert_eq!(code.min_distance(DistanceMode::Exact).unwrap().value, None);
        assert!(matches!(
            lifted_product(&one, &one_plus_x(2)),
            Err(Error::GroupMismatch)
        ));
    }

    #[test]
    fn ring_variant_is_valid() {
        let a = GroupAlgebraMatrix::parse(5, &[vec!["1+x", "x^2"], vec!["x^3", "1+x^4"]]).unwrap();
        let b = GroupAlgebraMatrix::parse(5, &[vec!["1+x^2", "x", "1"]]).unwrap();
        for code in [lifted_product_ring(&a, &b).unwrap(), lifted_product(&a, &b).unwrap()] {
            assert!(css_valid(&code));
        }
        let toric = lifted_product_ring(&one_plus_x(4), &one_plus_x(4)).unwrap();
        assert_eq!((toric.n, code_dimension(&toric)), (8, 2));
    }

    #[test]
    fn css_validity_examples() {
        let row = |bits: Vec<u8>| BitMatrix::from_dense(2, &[bits]).unwrap();
        assert!(css_valid(&CSSCode::new(row(vec![1, 1]), row(vec![1, 1])).unwrap()));
        assert!(!css_valid(&CSSCode::new(row(vec![1, 0]), row(vec![1, 0])).unwrap()));
        let zero = CSSCode::new(BitMatrix::zeros(0, 5), BitMatrix::zeros(0, 5)).unwrap();
        assert_eq!(code_dimension(&zero), 5);
    }

    #[test]
    fn dimension_survives_row_mixing() {
        let code = lifted_product(&one_plus_x(3), &one_plus_x(3)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mix = |m: &BitMatrix, rng: &mut ChaCha8Rng| {
            let mut rows = m.rows().to_vec();
            for _ in 0..50 {
                let (i, j) = (rng.gen_range(0..rows.len()), rng.gen_range(0..rows.len()));
                if i != j {
                    let r = rows[j].clone();
                    rows[i].xor_assign(&r);
                }
            }
            rows.push(BitVec::zeros(m.num_cols()));
            BitMatrix::from_rows(m.num_cols(), rows).unwrap()
        };
        let mixed = CSSCode::new(mix(&code.hx, &mut rng), mix(&code.hz, &mut rng)).unwrap();
        assert_eq!(code_dimension(&mixed), code_dimension(&code));
    }

    #[test]
    fn information_set_bounds_exact() {
        let code = lifted_product(&one_plus_x(4), &one_plus_x(4)).unwrap();
        let exact = code.min_distance(DistanceMode::Exact).unwrap().value.unwrap();
        for seed in 0..5 {
            let ub = code
                .min_distance(DistanceMode::InformationSet { trials: 20, seed })
                .unwrap()
                .value
                .unwrap();
            assert!(ub >= exact);
        }
    }

    #[test]
    fn css_json_roundtrip() {
        let code = lifted_product(&one_plus_x(3), &one_plus_x(3)).unwrap();
        let j = code.to_json(Some(code.min_distance(DistanceMode::Exact).unwrap()));
        let text = serde_json::to_string(&j).unwrap();
        assert!(text.contains("\"H_X\""));
        let back: CSSJson = serde_json::from_str(&text).unwrap();
        assert_eq!(CSSCode::from_json(&back).unwrap(), code);
    }

    #[test]
    fn tanner_examples() {
        let k4 = RegularGraph::complete(4);
        let full = tanner_code(&k4, &LinearCodeF2::full_space(3)).unwrap();
        assert_eq!(full.num_rows(), 0);
        let h = tanner_code(&k4, &LinearCodeF2::even_weight(3)).unwrap();
        assert_eq!(h.num_rows(), 4);
        assert_eq!(6 - h.rank(), 3);
        assert!(tanner_code(&k4, &LinearCodeF2::even_weight(4)).is_err());
    }

    #[test]
    fn structure_check_examples() {
        let ident = BitMatrix::identity(6);
        assert!(circulant_structure_check(&ident, &BlockLayout::cyclic(2)).unwrap());
        let mut unit = BitMatrix::zeros(1, 2);
        unit.set(0, 0, true);
        assert!(!circulant_structure_check(&unit, &BlockLayout::cyclic(2)).unwrap());
        assert!(circulant_structure_check(&ident, &BlockLayout::cyclic(4)).is_err());
    }

    #[test]
    fn tanner_on_certified_lifts() {
        let base = random_regular(8, 3, 3).unwrap();
        for group in [
            AbelianGroupSpec::cyclic(5).unwrap(),
            AbelianGroupSpec::from_factors(&[2, 2]).unwrap(),
        ] {
            let dist = SigningDistribution::new(
                group.clone(),
                base.num_edges(),
                vec![Signing::random(&base, group.clone(), 7).values().to_vec()],
                crate::pseudorandom::Provenance::Explicit,
            )
            .unwrap();
            let cert = derandomized_lift_search(&base, &dist, None).unwrap().certificate;
            let (h, layout) = tanner_from_certificate(&cert, &LinearCodeF2::even_weight(3)).unwrap();
            assert!(circulant_structure_check(&h, &layout).unwrap());
            let report = free_action_check(&cert).unwrap();
            assert!(report.pass());
            // every group element, not only generators, preserves the code
            for g in group.elements() {
                let p = group.permutation(&g);
                let cols = layout.column_permutation(p, h.num_cols());
                assert!(h.permute_columns(&cols).same_row_space(&h));
            }
        }
    }

    #[test]
    fn base_matrix_expands_to_lift_tanner() {
        let base = random_regular(6, 3, 1).unwrap();
        let s = Signing::random(&base, AbelianGroupSpec::cyclic(4).unwrap(), 2);
        let c0 = LinearCodeF2::even_weight(3);
        let bm = tanner_base_matrix(&base, &s, &c0).unwrap();
        let lifted = lift(&base, &s, false).unwrap();
        assert!(bm.expand().same_row_space(&tanner_code(&lifted, &c0).unwrap()));
    }

    #[test]
    fn free_action_examples() {
        let z4 = AbelianGroupSpec::cyclic(4).unwrap();
        let plain = free_action_on_edges(&z4, &[(0, 1, GroupElement(vec![1]))]);
        assert!(plain.pass());
        let half = free_action_on_edges(&z4, &[(0, 0, GroupElement(vec![2]))]);
        assert!(half.vertices_free);
        assert!(!half.edges_free);
        assert!(half.fixed_edges.iter().all(|f| f.element == 2));
        let z1 = AbelianGroupSpec::cyclic(1).unwrap();
        assert!(free_action_on_edges(&z1, &[(0, 1, GroupElement(vec![0]))]).pass());
    }

    #[test]
    fn local_search() {
        let rep = local_code_search(3, 3, 1, 1000, 0).unwrap();
        assert_eq!(
            (rep.dimension(), rep.min_distance(DistanceMode::Exact).unwrap().value),
            (1, Some(3))
        );
        let c = local_code_search(7, 3, 3, 100_000, 1).unwrap();
        assert!(c.min_distance(DistanceMode::Exact).unwrap().value.unwrap() >= 3);
        assert!(c.dual().min_distance(DistanceMode::Exact).unwrap().value.unwrap() >= 3);
        assert!(matches!(
            local_code_search(3, 4, 1, 500, 0),
            Err(Error::BudgetExhausted(_))
        ));
    }
}

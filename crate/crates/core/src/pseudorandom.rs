//! Signing distributions over `H^m`: exact and sampled bias, small-bias set
//! search, and signings drawn from random walks on an auxiliary expander.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{random_regular_with_budget, GraphJson, RegularGraph, Signing};
use crate::groups::{root_of_unity, AbelianGroupSpec, GroupDescriptor, GroupElement};
use crate::spectral::lambda;

/// Largest number of characters of `H^m` enumerated by [`bias_exact`].
pub const CHARACTER_GUARD: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Provenance {
    UniformExhaustive,
    BiasedSet {
        nu: f64,
        verified_bias: f64,
        /// `false` when the bias was only sampled (a lower bound).
        exact: bool,
        seed: u64,
    },
    ExpanderWalk {
        seed: u64,
        aux_degree: usize,
        walk_length: usize,
    },
    Explicit,
}

/// Uniform distribution over an explicit support in `H^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct SigningDistribution {
    group: AbelianGroupSpec,
    m: usize,
    support: Vec<Vec<GroupElement>>,
    provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionJson {
    pub group: GroupDescriptor,
    pub m: usize,
    pub support: Vec<Vec<Vec<u32>>>,
    pub provenance: Provenance,
    pub verified_bias: Option<f64>,
}

impl SigningDistribution {
    pub fn new(
        group: AbelianGroupSpec,
        m: usize,
        support: Vec<Vec<GroupElement>>,
        provenance: Provenance,
    ) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::EmptySupport);
        }
        for (i, s) in support.iter().enumerate() {
            if s.len() != m {
                return Err(Error::Shape(format!(
                    "support element {i} has {} coordinates, expected {m}",
                    s.len()
                )));
            }
            for g in s {
                group.element(g.0.clone())?;
            }
        }
        Ok(Self {
            group,
            m,
            support,
            provenance,
        })
    }

    /// Every element of `H^m`.
    pub fn uniform_exhaustive(group: AbelianGroupSpec, m: usize, guard: usize) -> Result<Self> {
        let size = checked_power(group.order(), m)
            .filter(|&s| s <= guard)
            .ok_or_else(|| Error::EnumerationGuard(format!("|H|^m exceeds {guard}")))?;
        let support = (0..size).map(|i| tuple_at(&group, m, i)).collect();
        Ok(Self {
            group,
            m,
            support,
            provenance: Provenance::UniformExhaustive,
        })
    }

    pub fn singleton_identity(group: AbelianGroupSpec, m: usize) -> Self {
        let id = group.identity();
        Self {
            support: vec![vec![id; m]],
            group,
            m,
            provenance: Provenance::Explicit,
        }
    }

    pub fn group(&self) -> &AbelianGroupSpec {
        &self.group
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn support(&self) -> &[Vec<GroupElement>] {
        &self.support
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn signing(&self, base: &RegularGraph, index: usize) -> Result<Signing> {
        Signing::new(base, self.group.clone(), self.support[index].clone())
    }

    pub fn to_json(&self, verified_bias: Option<f64>) -> DistributionJson {
        DistributionJson {
            group: self.group.descriptor(),
            m: self.m,
            support: self
                .support
                .iter()
                .map(|s| s.iter().map(|g| g.0.clone()).collect())
                .collect(),
            provenance: self.provenance.clone(),
            verified_bias,
        }
    }

    pub fn from_json(json: &DistributionJson) -> Result<Self> {
        let group = AbelianGroupSpec::from_descriptor(&json.group)?;
        let support = json
            .support
            .iter()
            .map(|s| s.iter().map(|g| group.element(g.clone())).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(group, json.m, support, json.provenance.clone())
    }
}

fn checked_power(base: usize, exp: usize) -> Option<usize> {
    (0..exp).try_fold(1usize, |acc, _| acc.checked_mul(base))
}

fn tuple_at(group: &AbelianGroupSpec, m: usize, mut index: usize) -> Vec<GroupElement> {
    let h = group.order();
    (0..m)
        .map(|_| {
            let g = group.element_at(index % h);
            index /= h;
            g
        })
        .collect()
}

/// Phase tables: `table[c][e]` is the phase index of character `c` on element `e`.
fn phase_table(group: &AbelianGroupSpec) -> (Vec<Vec<u64>>, u64) {
    let l = group.exponent();
    let elements: Vec<GroupElement> = group.elements().collect();
    let table = group
        .all_characters()
        .iter()
        .map(|chi| elements.iter().map(|g| group.char_phase(chi, g).0).collect())
        .collect();
    (table, l)
}

/// Integer coefficients of the `n`-th cyclotomic polynomial, lowest degree first.
fn cyclotomic(n: u64) -> Vec<i128> {
    // x^n − 1 divided by Φ_d for every proper divisor d
    let mut poly = vec![0i128; n as usize + 1];
    poly[0] = -1;
    poly[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            poly = exact_divide(&poly, &cyclotomic(d));
        }
    }
    poly
}

fn exact_divide(num: &[i128], den: &[i128]) -> Vec<i128> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut quot = vec![0i128; num.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd];
        quot[i] = c;
        for (j, &dc) in den.iter().enumerate() {
            rem[i + j] -= c * dc;
        }
    }
    quot
}

/// Whether `Σ counts[k]·ω^k = 0` for a primitive `L`-th root `ω`.
fn vanishes(counts: &[i128], phi: &[i128]) -> bool {
    let mut rem = counts.to_vec();
    let deg = phi.len() - 1;
    for i in (deg..rem.len()).rev() {
        let c = rem[i];
        if c != 0 {
            for (j, &pc) in phi.iter().enumerate() {
                rem[i - deg + j] -= c * pc;
            }
        }
    }
    rem[..deg.min(rem.len())].iter().all(|&c| c == 0)
}

struct BiasEvaluator {
    table: Vec<Vec<u64>>,
    l: u64,
    phi: Vec<i128>,
    /// Support as element indices.
    support: Vec<Vec<usize>>,
    h: usize,
}

impl BiasEvaluator {
    fn new(dist: &SigningDistribution) -> Self {
        let (table, l) = phase_table(&dist.group);
        let support = dist
            .support
            .iter()
            .map(|s| s.iter().map(|g| dist.group.index_of(g)).collect())
            .collect();
        Self {
            table,
            l,
            phi: cyclotomic(l),
            support,
            h: dist.group.order(),
        }
    }

    /// `|E χ(s)|` for the product character whose per-coordinate indices are `chars`.
    fn bias(&self, chars: &[usize]) -> f64 {
        let mut counts = vec![0i128; self.l as usize];
        for s in &self.support {
            let k = chars.iter().zip(s).map(|(&c, &e)| self.table[c][e]).sum::<u64>() % self.l;
            counts[k as usize] += 1;
        }
        let total = self.support.len() as f64;
        let present: Vec<usize> = (0..counts.len()).filter(|&k| counts[k] != 0).collect();
        if present.len() == 1 {
            return counts[present[0]] as f64 / total;
        }
        if vanishes(&counts, &self.phi) {
            return 0.0;
        }
        let sum: num_complex::Complex64 = present
            .iter()
            .map(|&k| root_of_unity(k as u64, self.l) * counts[k] as f64)
            .sum();
        sum.norm() / total
    }

    fn character(&self, m: usize, mut index: usize) -> Vec<usize> {
        (0..m)
            .map(|_| {
                let c = index % self.h;
                index /= self.h;
                c
            })
            .collect()
    }
}

/// Largest `|E χ(s)|` over all nontrivial characters of `H^m`.
pub fn bias_exact(dist: &SigningDistribution) -> Result<f64> {
    let chars = checked_power(dist.group.order(), dist.m)
        .filter(|&c| c <= CHARACTER_GUARD)
        .ok_or_else(|| Error::EnumerationGuard(format!("more than {CHARACTER_GUARD} characters; use bias_sampled")))?;
    let eval = BiasEvaluator::new(dist);
    Ok((1..chars)
        .into_par_iter()
        .map(|i| eval.bias(&eval.character(dist.m, i)))
        .reduce(|| 0.0, f64::max))
}

/// Largest bias over `trials` random nontrivial characters; a lower bound.
pub fn bias_sampled(dist: &SigningDistribution, trials: usize, seed: u64) -> f64 {
    let eval = BiasEvaluator::new(dist);
    let h = dist.group.order();
    if h == 1 || dist.m == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks: Vec<Vec<usize>> = (0..trials)
        .map(|_| loop {
            let c: Vec<usize> = (0..dist.m).map(|_| rng.gen_range(0..h)).collect();
            if c.iter().any(|&x| x != 0) {
                break c;
            }
        })
        .collect();
    picks.par_iter().map(|c| eval.bias(c)).reduce(|| 0.0, f64::max)
}

/// Exact bias when the character count allows it, otherwise a sampled lower bound.
pub fn bias_best_effort(dist: &SigningDistribution, trials: usize, seed: u64) -> (f64, bool) {
    match bias_exact(dist) {
        Ok(b) => (b, true),
        Err(_) => (bias_sampled(dist, trials, seed), false),
    }
}

/// Finds a support of size at most `size_budget` whose verified bias is at most `nu`.
///
/// Tries the identity singleton when `nu ≥ 1`, the whole of `H^m` when it fits
/// the budget, and otherwise random distinct subsets of size `size_budget`.
pub fn biased_set_search(
    group: AbelianGroupSpec,
    m: usize,
    nu: f64,
    size_budget: usize,
    trial_budget: usize,
    seed: u64,
) -> Result<SigningDistribution> {
    const SAMPLED_TRIALS: usize = 4096;
    let tag = |verified_bias: f64, exact: bool| Provenance::BiasedSet {
        nu,
        verified_bias,
        exact,
        seed,
    };
    if nu >= 1.0 && size_budget >= 1 {
        let mut d = SigningDistribution::singleton_identity(group, m);
        d.provenance = tag(1.0, true);
        return Ok(d);
    }
    let total = checked_power(group.order(), m);
    if let Some(total) = total.filter(|&t| t <= size_budget) {
        let mut d = SigningDistribution::uniform_exhaustive(group.clone(), m, total)?;
        let (b, exact) = bias_best_effort(&d, SAMPLED_TRIALS, seed);
        if b <= nu {
            d.provenance = tag(b, exact);
            return Ok(d);
        }
    }
    let size = total.map_or(size_budget, |t| t.min(size_budget));
    if size == 0 {
        return Err(Error::BudgetExhausted("size budget is zero".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trial_budget {
        let support: Vec<Vec<GroupElement>> = match total {
            Some(t) if t <= 1 << 26 => sample(&mut rng, t, size)
                .into_iter()
                .map(|i| tuple_at(&group, m, i))
                .collect(),
            _ => {
                let mut seen = BTreeSet::new();
                while seen.len() < size {
                    let t: Vec<usize> = (0..m).map(|_| rng.gen_range(0..group.order())).collect();
                    seen.insert(t);
                }
                seen.into_iter()
                    .map(|t| t.into_iter().map(|i| group.element_at(i)).collect())
                    .collect()
            }
        };
        let mut d = SigningDistribution::new(group.clone(), m, support, Provenance::Explicit)?;
        let (b, exact) = bias_best_effort(&d, SAMPLED_TRIALS, rng.gen());
        if b <= nu {
            d.provenance = tag(b, exact);
            return Ok(d);
        }
    }
    Err(Error::BudgetExhausted(format!(
        "no {nu}-biased set of size {size} found in {trial_budget} trials"
    )))
}

/// A random regular graph on `ℓ` vertices whose `λ` is certified at most `3√(d'−1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxiliaryExpander {
    pub graph: RegularGraph,
    pub degree: usize,
    pub lambda: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxiliaryCertificate {
    pub graph: GraphJson,
    pub degree: usize,
    pub lambda: f64,
    pub bound: f64,
}

/// Degree actually used on `ℓ` vertices: `d'` capped at `ℓ−1` rounded down to even.
pub fn effective_aux_degree(l: usize, d_aux: usize) -> usize {
    let cap = if (l - 1).is_multiple_of(2) { l - 1 } else { l - 2 };
    d_aux.min(cap)
}

impl AuxiliaryExpander {
    pub fn build(l: usize, d_aux: usize, seed: u64) -> Result<Self> {
        if l < 3 {
            return Err(Error::Regime(format!("walk signings need ℓ ≥ 3, got {l}")));
        }
        if d_aux < 2 || d_aux % 2 == 1 {
            return Err(Error::Regime(format!(
                "auxiliary degree must be even and ≥ 2, got {d_aux}"
            )));
        }
        let degree = effective_aux_degree(l, d_aux);
        let bound = 3.0 * ((degree - 1) as f64).sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        const ATTEMPTS: usize = 200;
        for _ in 0..ATTEMPTS {
            let graph = random_regular_with_budget(l, degree, rng.gen(), 1000)?;
            let lam = lambda(&graph)?;
            if lam <= bound + 1e-9 {
                return Ok(Self {
                    graph,
                    degree,
                    lambda: lam,
                    bound,
                });
            }
        }
        Err(Error::RejectionBudget(ATTEMPTS))
    }

    pub fn certificate(&self) -> AuxiliaryCertificate {
        AuxiliaryCertificate {
            graph: self.graph.to_json(),
            degree: self.degree,
            lambda: self.lambda,
            bound: self.bound,
        }
    }

    /// Vertex sequence of a walk visiting `len` vertices from a uniform start.
    pub fn walk(&self, len: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let l = self.graph.n();
        let mut v = rng.gen_range(0..l);
        let mut out = Vec::with_capacity(len);
        for i in 0..len {
            if i > 0 {
                let nb = self.graph.neighbors(v);
                v = nb[rng.gen_range(0..nb.len())];
            }
            out.push(v);
        }
        out
    }

    /// Signing over `Z_ℓ` read off a walk of `|E(base)|` vertices in canonical edge order.
    pub fn walk_signing(&self, base: &RegularGraph, rng: &mut ChaCha8Rng) -> Result<(Signing, Vec<usize>)> {
        let walk = self.walk(base.num_edges(), rng);
        let residues: Vec<u32> = walk.iter().map(|&v| v as u32).collect();
        Ok((Signing::cyclic(base, self.graph.n() as u32, &residues)?, walk))
    }
}

/// Per-walk generator: stream `i + 1` of the master seed (stream 0 builds the expander).
pub fn walk_rng(seed: u64, i: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i + 1);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkSigning {
    pub signing: Signing,
    pub walk: Vec<usize>,
    pub aux: AuxiliaryExpander,
}

pub fn expander_walk_signing(base: &RegularGraph, l: usize, d_aux: usize, seed: u64) -> Result<WalkSigning> {
    let aux = AuxiliaryExpander::build(l, d_aux, seed)?;
    let (signing, walk) = aux.walk_signing(base, &mut walk_rng(seed, 0))?;
    Ok(WalkSigning { signing, walk, aux })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoeffdingReport {
    pub trials: usize,
    pub empirical_re: f64,
    pub empirical_im: f64,
    pub bound: f64,
    pub sigma: f64,
    pub pass: bool,
}

/// `2·exp(−t²/(128e|U|))`, with the vacuous value 2 at `t = 0`.
pub fn hoeffding_bound(t: f64, u: usize) -> f64 {
    if t <= 0.0 {
        2.0
    } else if u == 0 {
        0.0
    } else {
        2.0 * (-(t * t) / (128.0 * std::f64::consts::E * u as f64)).exp()
    }
}

/// Frequency over fresh walk signings of `|Σ_{e∈U} Re χ(s(e))| ≥ t` (and the
/// imaginary analogue) for the character `χ(j) = e^{2πij/ℓ}`, against the tail
/// bound plus three binomial standard deviations.
pub fn hoeffding_tail_check(
    base: &RegularGraph,
    l: usize,
    d_aux: usize,
    edges: &[usize],
    t: f64,
    trials: usize,
    seed: u64,
) -> Result<HoeffdingReport> {
    if let Some(&e) = edges.iter().find(|&&e| e >= base.num_edges()) {
        return Err(Error::Shape(format!("edge {e} out of range")));
    }
    let aux = AuxiliaryExpander::build(l, d_aux, seed)?;
    let hits: Vec<(bool, bool)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let walk = aux.walk(base.num_edges(), &mut walk_rng(seed, i as u64));
            let sum: num_complex::Complex64 = edges.iter().map(|&e| root_of_unity(walk[e] as u64, l as u64)).sum();
            (sum.re.abs() >= t, sum.im.abs() >= t)
        })
        .collect();
    let n = trials.max(1) as f64;
    let empirical_re = hits.iter().filter(|h| h.0).count() as f64 / n;
    let empirical_im = hits.iter().filter(|h| h.1).count() as f64 / n;
    let bound = hoeffding_bound(t, edges.len());
    let p = bound.min(1.0);
    let sigma = (p * (1.0 - p) / n).sqrt();
    Ok(HoeffdingReport {
        trials,
        empirical_re,
        empirical_im,
        bound,
        sigma,
        pass: empirical_re <= bound + 3.0 * sigma && empirical_im <= bound + 3.0 * sigma,
    })
}

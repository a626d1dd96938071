//! Finite abelian groups acting on `[ℓ]`, their elements and linear characters.
//!
//! A group is stored as invariant factors `(m_1, …, m_t)` together with the
//! permutations of `[ℓ]` realising the canonical generators. Elements and
//! characters are exponent vectors reduced modulo the factors.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A permutation of `[ℓ]`, stored as the 0-based image of each point.
pub type Permutation = Vec<usize>;

/// An element of `Z_{m_1} × … × Z_{m_t}` as a vector of exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(pub Vec<u32>);

impl GroupElement {
    pub fn exponents(&self) -> &[u32] {
        &self.0
    }
}

/// A linear character, indexed by its dual exponents. The all-zero index is
/// the trivial character.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CharacterIndex(pub Vec<u32>);

impl CharacterIndex {
    pub fn is_trivial(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

/// A finite abelian group with a permutation action on `[ℓ]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianGroupSpec {
    factors: Vec<u32>,
    generators: Vec<Permutation>,
    degree: usize,
    /// `action[h]` is the permutation realising element with linear index `h`.
    action: Vec<Permutation>,
}

/// JSON descriptor: `{"factors":[...], "generators":[[1-based images], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupDescriptor {
    #[serde(default)]
    pub factors: Vec<u32>,
    #[serde(default)]
    pub generators: Vec<Vec<usize>>,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

fn compose_perm(first: &[usize], then: &[usize]) -> Permutation {
    first.iter().map(|&i| then[i]).collect()
}

fn perm_order(p: &[usize]) -> u32 {
    let n = p.len();
    let mut seen = vec![false; n];
    let mut order = 1u64;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0u64;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = p[i];
            len += 1;
        }
        order = lcm(order, len);
    }
    order as u32
}

fn check_permutation(p: &[usize], degree: usize) -> Result<()> {
    if p.len() != degree {
        return Err(Error::InvalidGroup(format!(
            "generator has {} images, expected {degree}",
            p.len()
        )));
    }
    let mut seen = vec![false; degree];
    for &x in p {
        if x >= degree || seen[x] {
            return Err(Error::InvalidGroup("generator is not a permutation".into()));
        }
        seen[x] = true;
    }
    Ok(())
}

/// `e^{2πi k / n}` with exact values on the quarter turns.
pub(crate) fn root_of_unity(k: u64, n: u64) -> Complex64 {
    let k = k % n;
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if (4 * k).is_multiple_of(n) {
        return match 4 * k / n {
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let theta = 2.0 * PI * (k as f64) / (n as f64);
    Complex64::new(theta.cos(), theta.sin())
}

impl AbelianGroupSpec {
    /// `Z_{m_1} × … × Z_{m_t}` acting on itself by translation, so `ℓ = Π m_i`.
    /// Points are the group elements in mixed-radix order (first factor fastest).
    pub fn from_factors(factors: &[u32]) -> Result<Self> {
        if factors.contains(&0) {
            return Err(Error::InvalidGroup("factors must be positive".into()));
        }
        let order: usize = factors.iter().map(|&m| m as usize).product();
        let generators = (0..factors.len())
            .map(|i| {
                (0..order)
                    .map(|p| {
                        let mut ex = mixed_radix_decode(p, factors);
                        ex[i] = (ex[i] + 1) % factors[i];
                        mixed_radix_encode(&ex, factors)
                    })
                    .collect()
            })
            .collect();
        Self::new(factors.to_vec(), generators, order)
    }

    /// `Z_ℓ` acting on `[ℓ]` by the cyclic shift `i ↦ i + 1`.
    pub fn cyclic(l: u32) -> Result<Self> {
        Self::from_factors(&[l])
    }

    /// Raw generator permutations (0-based images); factors are the generator orders.
    pub fn from_generators(generators: Vec<Permutation>) -> Result<Self> {
        let degree = generators.first().map_or(1, |g| g.len());
        for g in &generators {
            check_permutation(g, degree)?;
        }
        let factors = generators.iter().map(|g| perm_order(g)).collect();
        Self::new(factors, generators, degree)
    }

    /// Explicit factors and generators; validates orders and commutation.
    pub fn new(factors: Vec<u32>, generators: Vec<Permutation>, degree: usize) -> Result<Self> {
        if factors.len() != generators.len() {
            return Err(Error::InvalidGroup(format!(
                "{} factors but {} generators",
                factors.len(),
                generators.len()
            )));
        }
        if degree == 0 {
            return Err(Error::InvalidGroup("action degree must be positive".into()));
        }
        for (g, &m) in generators.iter().zip(&factors) {
            if m == 0 {
                return Err(Error::InvalidGroup("factors must be positive".into()));
            }
            check_permutation(g, degree)?;
            if m % perm_order(g) != 0 {
                return Err(Error::InvalidGroup(format!(
                    "generator order {} does not divide factor {m}",
                    perm_order(g)
                )));
            }
        }
        for (i, a) in generators.iter().enumerate() {
            for b in &generators[i + 1..] {
                if compose_perm(a, b) != compose_perm(b, a) {
                    return Err(Error::InvalidGroup("generators do not commute".into()));
                }
            }
        }
        let order: usize = factors.iter().map(|&m| m as usize).product();
        let mut action = Vec::with_capacity(order);
        for h in 0..order {
            let ex = mixed_radix_decode(h, &factors);
            let mut p: Permutation = (0..degree).collect();
            for (gen, &e) in generators.iter().zip(&ex) {
                for _ in 0..e {
                    p = compose_perm(&p, gen);
                }
            }
            action.push(p);
        }
        Ok(Self {
            factors,
            generators,
            degree,
            action,
        })
    }

    pub fn from_descriptor(desc: &GroupDescriptor) -> Result<Self> {
        if desc.generators.is_empty() {
            return Self::from_factors(&desc.factors);
        }
        let gens: Vec<Permutation> = desc
            .generators
            .iter()
            .map(|g| {
                g.iter()
                    .map(|&x| {
                        x.checked_sub(1)
                            .ok_or_else(|| Error::InvalidGroup("generator images are 1-based".into()))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        if desc.factors.is_empty() {
            Self::from_generators(gens)
        } else {
            let degree = gens[0].len();
            Self::new(desc.factors.clone(), gens, degree)
        }
    }

    pub fn descriptor(&self) -> GroupDescriptor {
        GroupDescriptor {
            factors: self.factors.clone(),
            generators: self
                .generators
                .iter()
                .map(|g| g.iter().map(|&x| x + 1).collect())
                .collect(),
        }
    }

    pub fn factors(&self) -> &[u32] {
        &self.factors
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    /// Size `ℓ` of the set acted upon.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `ℓ' = Π m_i`.
    pub fn order(&self) -> usize {
        self.action.len()
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(vec![0; self.factors.len()])
    }

    pub fn element(&self, exponents: Vec<u32>) -> Result<GroupElement> {
        if exponents.len() != self.factors.len() {
            return Err(Error::GroupMismatch);
        }
        Ok(GroupElement(
            exponents.iter().zip(&self.factors).map(|(&e, &m)| e % m).collect(),
        ))
    }

    fn check(&self, g: &GroupElement) -> Result<()> {
        if g.0.len() != self.factors.len() || g.0.iter().zip(&self.factors).any(|(&e, &m)| e >= m) {
            return Err(Error::GroupMismatch);
        }
        Ok(())
    }

    pub fn compose(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        self.check(h)?;
        Ok(GroupElement(
            g.0.iter()
                .zip(&h.0)
                .zip(&self.factors)
                .map(|((&a, &b), &m)| (a + b) % m)
                .collect(),
        ))
    }

    pub fn inverse(&self, g: &GroupElement) -> GroupElement {
        GroupElement(g.0.iter().zip(&self.factors).map(|(&a, &m)| (m - a % m) % m).collect())
    }

    /// Linear index of an element (mixed radix, first factor fastest).
    pub fn index_of(&self, g: &GroupElement) -> usize {
        mixed_radix_encode(&g.0, &self.factors)
    }

    pub fn element_at(&self, index: usize) -> GroupElement {
        GroupElement(mixed_radix_decode(index, &self.factors))
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order()).map(|i| self.element_at(i))
    }

    /// Image of point `i` under `g`.
    pub fn act(&self, g: &GroupElement, i: usize) -> usize {
        self.action[self.index_of(g)][i]
    }

    pub fn permutation(&self, g: &GroupElement) -> &[usize] {
        &self.action[self.index_of(g)]
    }

    /// Phase of `χ(g)` as `k / L` with `L = lcm(m_i)`.
    pub fn char_phase(&self, chi: &CharacterIndex, g: &GroupElement) -> (u64, u64) {
        let l = self.exponent();
        let k = chi
            .0
            .iter()
            .zip(&g.0)
            .zip(&self.factors)
            .map(|((&c, &e), &m)| (c as u64 * e as u64 % m as u64) * (l / m as u64))
            .sum::<u64>()
            % l;
        (k, l)
    }

    /// `χ(g) = exp(2πi Σ χ_i g_i / m_i)`.
    pub fn char_eval(&self, chi: &CharacterIndex, g: &GroupElement) -> Complex64 {
        let (k, l) = self.char_phase(chi, g);
        root_of_unity(k, l)
    }

    /// Exponent of the group, `lcm(m_i)`.
    pub fn exponent(&self) -> u64 {
        self.factors.iter().fold(1u64, |acc, &m| lcm(acc, m as u64))
    }

    /// All `ℓ'` characters; the first is trivial.
    pub fn all_characters(&self) -> Vec<CharacterIndex> {
        (0..self.order())
            .map(|i| CharacterIndex(mixed_radix_decode(i, &self.factors)))
            .collect()
    }

    /// The character `χ̄` with `χ̄(g) = conj(χ(g))`.
    pub fn conjugate_character(&self, chi: &CharacterIndex) -> CharacterIndex {
        CharacterIndex(
            chi.0
                .iter()
                .zip(&self.factors)
                .map(|(&c, &m)| (m - c % m) % m)
                .collect(),
        )
    }

    pub fn is_transitive(&self) -> bool {
        let mut seen = vec![false; self.degree];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(p) = stack.pop() {
            for g in &self.generators {
                let q = g[p];
                if !seen[q] {
                    seen[q] = true;
                    count += 1;
                    stack.push(q);
                }
            }
        }
        count == self.degree
    }

    /// Multiplicity of every character in the permutation representation on `[ℓ]`,
    /// `⟨χ, fix⟩ = (1/|H|) Σ_h conj(χ(h)) · #fix(h)`. Returned in `all_characters` order
    /// with zero-multiplicity characters dropped.
    pub fn decomposition(&self) -> Vec<(CharacterIndex, usize)> {
        let fixed: Vec<usize> = self
            .action
            .iter()
            .map(|p| p.iter().enumerate().filter(|(i, &x)| *i == x).count())
            .collect();
        let order = self.order() as f64;
        self.all_characters()
            .into_iter()
            .filter_map(|chi| {
                let sum: Complex64 = (0..self.order())
                    .map(|h| self.char_eval(&chi, &self.element_at(h)).conj() * fixed[h] as f64)
                    .sum();
                let mult = (sum.re / order).round() as usize;
                (mult > 0).then_some((chi, mult))
            })
            .collect()
    }
}

fn mixed_radix_decode(mut index: usize, factors: &[u32]) -> Vec<u32> {
    factors
        .iter()
        .map(|&m| {
            let e = (index % m as usize) as u32;
            index /= m as usize;
            e
        })
        .collect()
}

fn mixed_radix_encode(ex: &[u32], factors: &[u32]) -> usize {
    ex.iter()
        .zip(factors)
        .rev()
        .fold(0usize, |acc, (&e, &m)| acc * m as usize + e as usize)
}

use std::collections::HashMap;
use std::fmt::Write as _;

use num_complex::Complex;

use super::{Mode, StateError};
use crate::Scalar;

/// Hard limit on photons created through the polynomial machinery; keeps
/// factorial bookkeeping exact in every supported scalar type.
pub const CREATION_MONOMIAL_LIMIT: u32 = 12;

fn factorial<T: Scalar>(n: u8) -> T {
    const TABLE: [f64; 13] = [
        1.0, 1.0, 2.0, 6.0, 24.0, 120.0, 720.0, 5040.0, 40320.0, 362880.0, 3628800.0, 39916800.0,
        479001600.0,
    ];
    T::from_f64_lossy(TABLE[n as usize])
}

/// Sorted occupation list; counts are always ≥ 1, modes strictly increasing.
pub(crate) type Occupations = Vec<(Mode, u8)>;

pub(crate) fn sort_and_merge_occupations(mut occ: Occupations) -> Occupations {
    occ.sort_unstable_by_key(|&(m, _)| m);
    let mut out: Occupations = Vec::with_capacity(occ.len());
    for (m, n) in occ {
        if n == 0 {
            continue;
        }
        match out.last_mut() {
            Some((last, count)) if *last == m => *count += n,
            _ => out.push((m, n)),
        }
    }
    out
}

/// One multi-photon Fock component: occupation numbers and an amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct FockTerm<T: Scalar> {
    occupations: Occupations,
    amplitude: Complex<T>,
}

impl<T: Scalar> FockTerm<T> {
    /// Builds a term, merging duplicate modes and dropping zero counts.
    pub fn new(occupations: Vec<(Mode, u8)>, amplitude: Complex<T>) -> Self {
        FockTerm {
            occupations: sort_and_merge_occupations(occupations),
            amplitude,
        }
    }

    pub fn vacuum(amplitude: Complex<T>) -> Self {
        FockTerm {
            occupations: Vec::new(),
            amplitude,
        }
    }

    pub fn occupations(&self) -> &[(Mode, u8)] {
        &self.occupations
    }

    pub fn amplitude(&self) -> Complex<T> {
        self.amplitude
    }

    pub fn total_photons(&self) -> u32 {
        self.occupations.iter().map(|&(_, n)| n as u32).sum()
    }

    /// Photons in one exact mode.
    pub fn count_mode(&self, mode: Mode) -> u8 {
        self.occupations
            .iter()
            .find(|&&(m, _)| m == mode)
            .map_or(0, |&(_, n)| n)
    }

    /// Photons at a port/bin slot summed over tags. Detectors cannot
    /// resolve the internal distinguishability label, so click logic
    /// always counts at this granularity.
    pub fn count_slot(&self, spatial: super::Spatial, bin: u8) -> u8 {
        self.occupations
            .iter()
            .filter(|&&(m, _)| m.spatial == spatial && m.bin == bin)
            .map(|&(_, n)| n)
            .sum()
    }

    /// Photons at a port summed over bins and tags.
    pub fn count_port(&self, spatial: super::Spatial) -> u8 {
        self.occupations
            .iter()
            .filter(|&&(m, _)| m.spatial == spatial)
            .map(|&(_, n)| n)
            .sum()
    }
}

/// Normalized superposition of Fock terms over labeled modes — the
/// simulator's universal state carrier.
///
/// Terms are kept in canonical order (occupations sorted, terms sorted,
/// duplicates merged), so equal states have equal representations and the
/// serialization is reproducible.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonicState<T: Scalar> {
    terms: Vec<FockTerm<T>>,
    cutoff: u32,
    norm_tolerance: T,
}

impl<T: Scalar> PhotonicState<T> {
    pub const DEFAULT_CUTOFF: u32 = 4;

    /// The vacuum state (single empty term, amplitude 1).
    pub fn vacuum() -> Self {
        PhotonicState {
            terms: vec![FockTerm::vacuum(Complex::new(T::one(), T::zero()))],
            cutoff: Self::DEFAULT_CUTOFF,
            norm_tolerance: T::tol(),
        }
    }

    /// A single photon in `mode`.
    pub fn single_photon(mode: Mode) -> Self {
        PhotonicState {
            terms: vec![FockTerm::new(
                vec![(mode, 1)],
                Complex::new(T::one(), T::zero()),
            )],
            cutoff: Self::DEFAULT_CUTOFF,
            norm_tolerance: T::tol(),
        }
    }

    /// Builds a state from raw terms: merges duplicates, enforces the
    /// photon cutoff and finite amplitudes, sorts canonically. Does not
    /// normalize.
    pub fn from_terms(terms: Vec<FockTerm<T>>, cutoff: u32) -> Result<Self, StateError> {
        let mut merged: HashMap<Occupations, Complex<T>> = HashMap::with_capacity(terms.len());
        for t in terms {
            if !t.amplitude.re.is_finite() || !t.amplitude.im.is_finite() {
                return Err(StateError::NonFinite);
            }
            let photons = t.total_photons();
            if photons > cutoff {
                return Err(StateError::CutoffExceeded {
                    found: photons,
                    cutoff,
                });
            }
            *merged
                .entry(t.occupations)
                .or_insert_with(|| Complex::new(T::zero(), T::zero())) += t.amplitude;
        }
        let mut terms: Vec<FockTerm<T>> = merged
            .into_iter()
            .filter(|(_, a)| a.norm_sqr() > T::drop_eps())
            .map(|(occupations, amplitude)| FockTerm {
                occupations,
                amplitude,
            })
            .collect();
        terms.sort_unstable_by(|a, b| a.occupations.cmp(&b.occupations));
        Ok(PhotonicState {
            terms,
            cutoff,
            norm_tolerance: T::tol(),
        })
    }

    pub fn with_cutoff(mut self, cutoff: u32) -> Result<Self, StateError> {
        for t in &self.terms {
            let photons = t.total_photons();
            if photons > cutoff {
                return Err(StateError::CutoffExceeded {
                    found: photons,
                    cutoff,
                });
            }
        }
        self.cutoff = cutoff;
        Ok(self)
    }

    pub fn terms(&self) -> &[FockTerm<T>] {
        &self.terms
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn norm_tolerance(&self) -> T {
        self.norm_tolerance
    }

    pub fn norm_sqr(&self) -> T {
        self.terms.iter().map(|t| t.amplitude.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - T::one()).abs() <= self.norm_tolerance
    }

    /// Rescales so that Σ|amp|² = 1, preserving relative phases.
    pub fn normalize(&self) -> Result<Self, StateError> {
        let n2 = self.norm_sqr();
        if n2.sqrt() < T::zero_state_eps() {
            return Err(StateError::ZeroState);
        }
        let inv = Complex::new(n2.sqrt().recip(), T::zero());
        let terms = self
            .terms
            .iter()
            .map(|t| FockTerm {
                occupations: t.occupations.clone(),
                amplitude: t.amplitude * inv,
            })
            .collect();
        Ok(PhotonicState {
            terms,
            cutoff: self.cutoff,
            norm_tolerance: self.norm_tolerance,
        })
    }

    /// Tensor product of states over disjoint port sets.
    pub fn tensor(&self, other: &Self) -> Result<Self, StateError> {
        let left_ports: std::collections::BTreeSet<_> = self
            .terms
            .iter()
            .flat_map(|t| t.occupations.iter().map(|&(m, _)| m.spatial))
            .collect();
        for t in &other.terms {
            for &(m, _) in &t.occupations {
                if left_ports.contains(&m.spatial) {
                    return Err(StateError::ModeCollision(m.spatial.to_string()));
                }
            }
        }
        let cutoff = self.cutoff.max(other.cutoff);
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let mut occ = a.occupations.clone();
                occ.extend_from_slice(&b.occupations);
                terms.push(FockTerm::new(occ, a.amplitude * b.amplitude));
            }
        }
        Self::from_terms(terms, cutoff)
    }

    /// Normalized state `(Σ_k c_k Π_j a†_{m_kj})^power |vac⟩`.
    ///
    /// Each monomial is a list of modes getting one creation operator and a
    /// coefficient. Raising the sum to a power reproduces the bosonic
    /// symmetrization of identical emissions (same source pumped n times),
    /// including stimulated-emission weight redistribution across the
    /// occupation patterns.
    pub fn from_creation_power(
        monomials: &[(Vec<Mode>, Complex<T>)],
        power: u32,
    ) -> Result<Self, StateError> {
        let per = monomials
            .iter()
            .map(|(ms, _)| ms.len() as u32)
            .max()
            .unwrap_or(0);
        if per * power > CREATION_MONOMIAL_LIMIT {
            return Err(StateError::CutoffExceeded {
                found: per * power,
                cutoff: CREATION_MONOMIAL_LIMIT,
            });
        }
        let mut poly = CreationPoly::<T>::unit();
        let step: Vec<(Occupations, Complex<T>)> = monomials
            .iter()
            .map(|(ms, c)| {
                (
                    sort_and_merge_occupations(ms.iter().map(|&m| (m, 1)).collect()),
                    *c,
                )
            })
            .collect();
        for _ in 0..power {
            poly = poly.multiply(&step);
        }
        let state = poly.into_state(CREATION_MONOMIAL_LIMIT)?;
        state.normalize()
    }

    /// Line-oriented text form: one term per line,
    /// `amp_re amp_im mode:count ...` with modes in canonical order.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for t in &self.terms {
            let _ = write!(
                out,
                "{:+.12e} {:+.12e}",
                t.amplitude.re.to_f64_lossy(),
                t.amplitude.im.to_f64_lossy()
            );
            for &(m, n) in &t.occupations {
                let _ = write!(out, " {m}:{n}");
            }
            out.push('\n');
        }
        out
    }

    /// Parses the [`serialize`](Self::serialize) format.
    pub fn parse(text: &str, cutoff: u32) -> Result<Self, StateError> {
        let mut terms = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let bad = |what: &str| StateError::Parse(format!("line {}: {what}", idx + 1));
            let re: f64 = tokens
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| bad("missing amplitude real part"))?;
            let im: f64 = tokens
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| bad("missing amplitude imaginary part"))?;
            let mut occ = Vec::new();
            for tok in tokens {
                let (mode, count) = tok
                    .split_once(':')
                    .ok_or_else(|| bad("mode token missing `:count`"))?;
                let mode: Mode = mode.parse()?;
                let count: u8 = count
                    .parse()
                    .map_err(|_| bad("bad occupation count"))?;
                occ.push((mode, count));
            }
            terms.push(FockTerm::new(
                occ,
                Complex::new(T::from_f64_lossy(re), T::from_f64_lossy(im)),
            ));
        }
        Self::from_terms(terms, cutoff)
    }

    /// Largest absolute difference between matching term amplitudes; `None`
    /// when the term structures differ.
    pub fn amplitude_distance(&self, other: &Self) -> Option<T> {
        if self.terms.len() != other.terms.len() {
            return None;
        }
        let mut max = T::zero();
        for (a, b) in self.terms.iter().zip(&other.terms) {
            if a.occupations != b.occupations {
                return None;
            }
            max = max.max((a.amplitude - b.amplitude).norm());
        }
        Some(max)
    }
}

/// Polynomial in creation operators: monomial occupations → coefficient of
/// `Π (a†)^n` (no Fock normalization applied yet).
pub(crate) struct CreationPoly<T: Scalar> {
    pub(crate) terms: HashMap<Occupations, Complex<T>>,
}

impl<T: Scalar> CreationPoly<T> {
    pub(crate) fn unit() -> Self {
        let mut terms = HashMap::new();
        terms.insert(Vec::new(), Complex::new(T::one(), T::zero()));
        CreationPoly { terms }
    }

    pub(crate) fn multiply(self, factor: &[(Occupations, Complex<T>)]) -> Self {
        let mut out: HashMap<Occupations, Complex<T>> =
            HashMap::with_capacity(self.terms.len() * factor.len());
        for (occ, coeff) in self.terms {
            for (f_occ, f_coeff) in factor {
                let mut merged = occ.clone();
                merged.extend_from_slice(f_occ);
                let merged = sort_and_merge_occupations(merged);
                *out.entry(merged)
                    .or_insert_with(|| Complex::new(T::zero(), T::zero())) += coeff * *f_coeff;
            }
        }
        CreationPoly { terms: out }
    }

    /// Applies to vacuum: `Π (a†)^n |0⟩ = √(Π n!) |n…⟩`.
    pub(crate) fn into_state(self, cutoff: u32) -> Result<PhotonicState<T>, StateError> {
        let terms = self
            .terms
            .into_iter()
            .map(|(occ, coeff)| {
                let mut boost = T::one();
                for &(_, n) in &occ {
                    boost = boost * factorial::<T>(n);
                }
                FockTerm {
                    occupations: occ,
                    amplitude: coeff * Complex::new(boost.sqrt(), T::zero()),
                }
            })
            .collect();
        PhotonicState::from_terms(terms, cutoff)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::Spatial;

    type S = PhotonicState<f64>;

    fn mode(spatial: Spatial, bin: u8) -> Mode {
        Mode::ref_tag(spatial, bin)
    }

    #[test]
    fn normalize_rescales_single_term() {
        let t = FockTerm::new(vec![(mode(Spatial::AliceIn, 0), 1)], Complex::new(2.0, 0.0));
        let s = S::from_terms(vec![t], 4).unwrap().normalize().unwrap();
        assert!((s.terms()[0].amplitude().re - 1.0).abs() < 1e-12);
        assert!(s.is_normalized());
    }

    #[test]
    fn normalize_symmetric_pair() {
        let one = Complex::new(1.0, 0.0);
        let s = S::from_terms(
            vec![
                FockTerm::new(vec![(mode(Spatial::AliceIn, 0), 1)], one),
                FockTerm::new(vec![(mode(Spatial::AliceIn, 1), 1)], one),
            ],
            4,
        )
        .unwrap()
        .normalize()
        .unwrap();
        for t in s.terms() {
            assert!((t.amplitude().norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        }
    }

    #[test]
    fn normalize_zero_state_errors() {
        let s = S::from_terms(
            vec![FockTerm::new(
                vec![(mode(Spatial::AliceIn, 0), 1)],
                Complex::new(0.0, 0.0),
            )],
            4,
        )
        .unwrap();
        assert_eq!(s.normalize().unwrap_err(), StateError::ZeroState);
    }

    #[test]
    fn from_terms_merges_duplicates_and_sorts() {
        let one = Complex::new(1.0, 0.0);
        let s = S::from_terms(
            vec![
                FockTerm::new(vec![(mode(Spatial::C2, 0), 1)], one),
                FockTerm::new(vec![(mode(Spatial::C1, 0), 1)], one),
                FockTerm::new(vec![(mode(Spatial::C2, 0), 1)], one),
            ],
            4,
        )
        .unwrap();
        assert_eq!(s.terms().len(), 2);
        assert_eq!(s.terms()[0].occupations()[0].0.spatial, Spatial::C1);
        assert!((s.terms()[1].amplitude().re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cutoff_is_enforced() {
        let t = FockTerm::new(vec![(mode(Spatial::C1, 0), 5)], Complex::new(1.0, 0.0));
        assert!(matches!(
            S::from_terms(vec![t], 4),
            Err(StateError::CutoffExceeded { found: 5, cutoff: 4 })
        ));
    }

    #[test]
    fn tensor_of_products() {
        let a = S::single_photon(mode(Spatial::AliceIn, 0));
        let c = S::single_photon(mode(Spatial::CharlieE, 0));
        let joint = a.tensor(&c).unwrap();
        assert_eq!(joint.terms().len(), 1);
        assert_eq!(joint.terms()[0].total_photons(), 2);
    }

    #[test]
    fn tensor_distributes_amplitudes() {
        let one = Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let a = S::from_terms(
            vec![
                FockTerm::new(vec![(mode(Spatial::AliceIn, 0), 1)], one),
                FockTerm::new(vec![(mode(Spatial::AliceIn, 1), 1)], one),
            ],
            4,
        )
        .unwrap();
        let b = S::from_terms(
            vec![
                FockTerm::new(vec![(mode(Spatial::BobIn, 0), 1)], one),
                FockTerm::new(vec![(mode(Spatial::BobIn, 1), 1)], one),
            ],
            4,
        )
        .unwrap();
        let joint = a.tensor(&b).unwrap();
        assert_eq!(joint.terms().len(), 4);
        for t in joint.terms() {
            assert!((t.amplitude().norm() - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn tensor_rejects_shared_ports() {
        let a = S::single_photon(mode(Spatial::BobIn, 0));
        let b = S::single_photon(mode(Spatial::BobIn, 1));
        assert!(matches!(a.tensor(&b), Err(StateError::ModeCollision(_))));
    }

    #[test]
    fn creation_power_two_identical_photons() {
        // (a†)²|0⟩ normalized is |2⟩; amplitude bookkeeping must give 1.
        let m = mode(Spatial::CharlieA, 0);
        let s = S::from_creation_power(
            &[(vec![m], Complex::new(1.0, 0.0))],
            2,
        )
        .unwrap();
        assert_eq!(s.terms().len(), 1);
        assert_eq!(s.terms()[0].count_mode(m), 2);
        assert!((s.terms()[0].amplitude().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn creation_power_pair_operator_shows_bosonic_enhancement() {
        // Two pair emissions from (c†b† + c†'b†')/√2: the doubly occupied
        // patterns carry the same weight as the one-each pattern.
        let c0 = mode(Spatial::CharlieE, 0);
        let b0 = mode(Spatial::BobIn, 0);
        let c1 = mode(Spatial::CharlieE, 1);
        let b1 = mode(Spatial::BobIn, 1);
        let inv = Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let s = S::from_creation_power(
            &[(vec![c0, b0], inv), (vec![c1, b1], inv)],
            2,
        )
        .unwrap();
        assert_eq!(s.terms().len(), 3);
        for t in s.terms() {
            assert!((t.amplitude().norm_sqr() - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn serialization_roundtrip() {
        let inv = Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.3);
        let s = S::from_terms(
            vec![
                FockTerm::new(vec![(mode(Spatial::C1, 0), 1), (mode(Spatial::C2, 1), 2)], inv),
                FockTerm::vacuum(Complex::new(0.25, -0.125)),
            ],
            4,
        )
        .unwrap();
        let text = s.serialize();
        let back = S::parse(&text, 4).unwrap();
        assert!(s.amplitude_distance(&back).unwrap() < 1e-11);
    }
}

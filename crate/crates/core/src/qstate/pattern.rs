use std::collections::{BTreeMap, BTreeSet};

use super::state::Occupations;
use super::{FockTerm, PhotonicState, Spatial, StateError};
use crate::Scalar;

/// A detector slot: port plus time bin. Detectors cannot resolve the
/// internal distinguishability tag, so patterns bind at this granularity.
pub type SlotKey = (Spatial, u8);

/// Post-selection rule: exact photon counts demanded at clicked slots and
/// ports that must otherwise be empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetectionPattern {
    clicks: BTreeMap<SlotKey, u8>,
    vacuum_elsewhere_over: BTreeSet<Spatial>,
}

impl DetectionPattern {
    pub fn new(
        clicks: BTreeMap<SlotKey, u8>,
        vacuum_elsewhere_over: BTreeSet<Spatial>,
    ) -> Result<Self, StateError> {
        if clicks.is_empty() || clicks.values().any(|&n| n == 0) {
            return Err(StateError::EmptyPattern);
        }
        Ok(DetectionPattern {
            clicks,
            vacuum_elsewhere_over,
        })
    }

    /// Convenience builder from `(port, bin, count)` triples; the vacuum
    /// requirement covers every clicked port plus `extra_vacuum`.
    pub fn from_clicks(
        clicks: &[(Spatial, u8, u8)],
        extra_vacuum: &[Spatial],
    ) -> Result<Self, StateError> {
        let mut map = BTreeMap::new();
        let mut vac = BTreeSet::new();
        for &(s, b, n) in clicks {
            map.insert((s, b), n);
            vac.insert(s);
        }
        vac.extend(extra_vacuum.iter().copied());
        Self::new(map, vac)
    }

    pub fn clicks(&self) -> &BTreeMap<SlotKey, u8> {
        &self.clicks
    }

    pub fn matches<T: Scalar>(&self, term: &FockTerm<T>) -> bool {
        for (&(s, b), &want) in &self.clicks {
            if term.count_slot(s, b) != want {
                return false;
            }
        }
        for &(m, n) in term.occupations() {
            if n > 0
                && self.vacuum_elsewhere_over.contains(&m.spatial)
                && !self.clicks.contains_key(&(m.spatial, m.bin))
            {
                return false;
            }
        }
        true
    }

    fn is_clicked_mode(&self, mode: super::Mode) -> bool {
        self.clicks.contains_key(&(mode.spatial, mode.bin))
    }
}

/// Result of conditioning a state on a detection pattern.
#[derive(Debug, Clone)]
pub struct Conditioned<T: Scalar> {
    /// Renormalized post-measurement state (see `record_kept`).
    pub state: PhotonicState<T>,
    /// Born probability of the pattern.
    pub probability: T,
    /// No term matched; `state` is a placeholder vacuum and
    /// `probability` is zero. A legitimate physical outcome, not an error.
    pub empty: bool,
    /// The detected photons were kept in the returned state because the
    /// matching terms differ in the tag content of the clicked slots.
    /// Discarding them would coherently merge residuals that are in fact
    /// orthogonal (the detector record distinguishes them); downstream
    /// density-operator reduction handles the kept record correctly.
    pub record_kept: bool,
}

/// Projects `state` onto the detection pattern.
///
/// The probability is the squared norm of the matching component. The
/// returned state is the renormalized restriction to unmeasured modes;
/// when that restriction would lose tag-orthogonality between detection
/// records, the clicked modes are retained instead (`record_kept`).
pub fn condition_on_pattern<T: Scalar>(
    state: &PhotonicState<T>,
    pattern: &DetectionPattern,
) -> Result<Conditioned<T>, StateError> {
    let matching: Vec<&FockTerm<T>> = state
        .terms()
        .iter()
        .filter(|t| pattern.matches(t))
        .collect();
    let probability: T = matching.iter().map(|t| t.amplitude().norm_sqr()).sum();
    if matching.is_empty() || probability.sqrt() < T::zero_state_eps() {
        return Ok(Conditioned {
            state: PhotonicState::vacuum(),
            probability: T::zero(),
            empty: true,
            record_kept: false,
        });
    }

    // Split each matching term into clicked-slot content and the rest.
    let mut first_record: Option<Occupations> = None;
    let mut record_kept = false;
    let mut split: Vec<(Occupations, Occupations, num_complex::Complex<T>)> =
        Vec::with_capacity(matching.len());
    for t in &matching {
        let mut record: Occupations = Vec::new();
        let mut rest: Occupations = Vec::new();
        for &(m, n) in t.occupations() {
            if pattern.is_clicked_mode(m) {
                record.push((m, n));
            } else {
                rest.push((m, n));
            }
        }
        match &first_record {
            None => first_record = Some(record.clone()),
            Some(r) if *r != record => record_kept = true,
            _ => {}
        }
        split.push((record, rest, t.amplitude()));
    }

    let terms: Vec<FockTerm<T>> = split
        .into_iter()
        .map(|(record, rest, amp)| {
            let occ = if record_kept {
                let mut occ = rest;
                occ.extend(record);
                occ
            } else {
                rest
            };
            FockTerm::new(occ, amp)
        })
        .collect();
    let conditional = PhotonicState::from_terms(terms, state.cutoff())?.normalize()?;
    Ok(Conditioned {
        state: conditional,
        probability,
        empty: false,
        record_kept,
    })
}

use std::collections::HashMap;

use num_complex::Complex;

use super::state::{sort_and_merge_occupations, CreationPoly, Occupations};
use super::{FockTerm, Mode, PhotonicState, StateError};
use crate::Scalar;

/// Action of a linear-optical element on creation operators:
/// `a†_in[j] → Σ_i matrix[i][j] a†_out[i]`.
///
/// Columns must be orthonormal (isometry). A square isometry is unitary;
/// the `lossy` flag admits rectangular isometries whose extra output rows
/// are explicit loss modes, so probability bookkeeping stays exact and
/// checkable.
#[derive(Debug, Clone)]
pub struct ModeTransform<T: Scalar> {
    inputs: Vec<Mode>,
    outputs: Vec<Mode>,
    matrix: Vec<Complex<T>>,
    lossy: bool,
}

impl<T: Scalar> ModeTransform<T> {
    /// Builds a square unitary transform. `matrix` is row-major,
    /// `outputs.len() × inputs.len()`.
    pub fn unitary(
        inputs: Vec<Mode>,
        outputs: Vec<Mode>,
        matrix: Vec<Complex<T>>,
    ) -> Result<Self, StateError> {
        if inputs.len() != outputs.len() {
            return Err(StateError::NotSquare {
                inputs: inputs.len(),
                outputs: outputs.len(),
            });
        }
        Self::build(inputs, outputs, matrix, false)
    }

    /// Builds a sub-unitary isometry into an extended output set that
    /// includes explicit loss modes.
    pub fn lossy(
        inputs: Vec<Mode>,
        outputs: Vec<Mode>,
        matrix: Vec<Complex<T>>,
    ) -> Result<Self, StateError> {
        Self::build(inputs, outputs, matrix, true)
    }

    fn build(
        inputs: Vec<Mode>,
        outputs: Vec<Mode>,
        matrix: Vec<Complex<T>>,
        lossy: bool,
    ) -> Result<Self, StateError> {
        assert_eq!(
            matrix.len(),
            inputs.len() * outputs.len(),
            "matrix shape mismatch"
        );
        let t = ModeTransform {
            inputs,
            outputs,
            matrix,
            lossy,
        };
        let dev = t.isometry_deviation();
        if dev > T::tol() {
            return Err(StateError::NotIsometry(dev.to_f64_lossy()));
        }
        Ok(t)
    }

    pub fn inputs(&self) -> &[Mode] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[Mode] {
        &self.outputs
    }

    pub fn is_lossy(&self) -> bool {
        self.lossy
    }

    fn entry(&self, row: usize, col: usize) -> Complex<T> {
        self.matrix[row * self.inputs.len() + col]
    }

    /// Max |(M†M − I)| entry.
    pub fn isometry_deviation(&self) -> T {
        let n = self.inputs.len();
        let mut max = T::zero();
        for a in 0..n {
            for b in 0..n {
                let mut dot = Complex::new(T::zero(), T::zero());
                for r in 0..self.outputs.len() {
                    dot += self.entry(r, a).conj() * self.entry(r, b);
                }
                let expect = if a == b { T::one() } else { T::zero() };
                max = max.max((dot - Complex::new(expect, T::zero())).norm());
            }
        }
        max
    }

    /// Conjugate-transpose transform (inverse of a unitary).
    pub fn adjoint(&self) -> Result<Self, StateError> {
        let n_in = self.inputs.len();
        let n_out = self.outputs.len();
        let mut matrix = vec![Complex::new(T::zero(), T::zero()); n_in * n_out];
        for r in 0..n_out {
            for c in 0..n_in {
                matrix[c * n_out + r] = self.entry(r, c).conj();
            }
        }
        Self::build(self.outputs.clone(), self.inputs.clone(), matrix, self.lossy)
    }

    /// Rewrites every creation operator of `state` through the matrix,
    /// expanding the multinomial exactly and applying the bosonic `√n!`
    /// factors. Populated modes outside `inputs` pass through untouched;
    /// a populated mode that is an output but not an input is rejected.
    pub fn apply(&self, state: &PhotonicState<T>) -> Result<PhotonicState<T>, StateError> {
        let col_of: HashMap<Mode, usize> = self
            .inputs
            .iter()
            .enumerate()
            .map(|(i, &m)| (m, i))
            .collect();
        let output_set: std::collections::HashSet<Mode> = self.outputs.iter().copied().collect();

        // Column polynomials: image of one creation operator per input.
        let columns: Vec<Vec<(Occupations, Complex<T>)>> = (0..self.inputs.len())
            .map(|c| {
                (0..self.outputs.len())
                    .filter_map(|r| {
                        let amp = self.entry(r, c);
                        (amp.norm_sqr() > T::drop_eps()).then(|| (vec![(self.outputs[r], 1)], amp))
                    })
                    .collect()
            })
            .collect();

        let mut result: HashMap<Occupations, Complex<T>> = HashMap::new();
        for term in state.terms() {
            let mut passthrough: Occupations = Vec::new();
            let mut transformed: Vec<(usize, u8)> = Vec::new();
            let mut coeff = term.amplitude();
            for &(m, n) in term.occupations() {
                coeff = coeff / Complex::new(factorial_sqrt::<T>(n), T::zero());
                match col_of.get(&m) {
                    Some(&c) => transformed.push((c, n)),
                    None => {
                        if output_set.contains(&m) {
                            return Err(StateError::UncoveredMode(m));
                        }
                        passthrough.push((m, n));
                    }
                }
            }

            let mut poly = CreationPoly::<T>::unit();
            if !passthrough.is_empty() || true {
                poly = poly.multiply(&[(sort_and_merge_occupations(passthrough), coeff)]);
            }
            for (c, n) in transformed {
                for _ in 0..n {
                    poly = poly.multiply(&columns[c]);
                }
            }
            for (occ, c) in poly.terms {
                if c.norm_sqr() <= T::drop_eps() {
                    continue;
                }
                let mut boost = T::one();
                for &(_, n) in &occ {
                    boost = boost * factorial_sqrt::<T>(n);
                }
                *result
                    .entry(occ)
                    .or_insert_with(|| Complex::new(T::zero(), T::zero())) +=
                    c * Complex::new(boost, T::zero());
            }
        }

        let terms: Vec<FockTerm<T>> = result
            .into_iter()
            .map(|(occ, amplitude)| FockTerm::new(occ, amplitude))
            .collect();
        PhotonicState::from_terms(terms, state.cutoff())
    }
}

fn factorial_sqrt<T: Scalar>(n: u8) -> T {
    const TABLE: [f64; 13] = [
        1.0, 1.0, 2.0, 6.0, 24.0, 120.0, 720.0, 5040.0, 40320.0, 362880.0, 3628800.0, 39916800.0,
        479001600.0,
    ];
    T::from_f64_lossy(TABLE[n as usize]).sqrt()
}

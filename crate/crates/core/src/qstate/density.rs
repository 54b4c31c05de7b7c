use std::collections::BTreeSet;

use num_complex::Complex;

use super::state::Occupations;
use super::{PhotonicState, Spatial, StateError};
use crate::Scalar;

/// Density operator over the Fock patterns that actually occur, used only
/// at the analysis boundary (conditional Bob states, fidelity estimates).
#[derive(Debug, Clone)]
pub struct DensityOperator<T: Scalar> {
    basis: Vec<Occupations>,
    matrix: Vec<Complex<T>>,
}

impl<T: Scalar> DensityOperator<T> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Occupations] {
        &self.basis
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex<T> {
        self.matrix[i * self.basis.len() + j]
    }

    pub fn trace(&self) -> T {
        (0..self.dim()).map(|i| self.entry(i, i).re).sum()
    }

    pub fn purity(&self) -> T {
        let n = self.dim();
        let mut acc = T::zero();
        for i in 0..n {
            for j in 0..n {
                acc = acc + (self.entry(i, j) * self.entry(j, i)).re;
            }
        }
        acc
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        hermitian_eigenvalues(&self.matrix, self.dim())
    }

    /// Checks Hermiticity, unit trace and spectrum ≥ −tol.
    pub fn validate(&self) -> Result<(), StateError> {
        let n = self.dim();
        let tol = T::tol();
        for i in 0..n {
            for j in 0..n {
                let dev = (self.entry(i, j) - self.entry(j, i).conj()).norm();
                if dev > tol {
                    return Err(StateError::InvalidDensity(format!(
                        "Hermiticity violation {:.3e}",
                        dev.to_f64_lossy()
                    )));
                }
            }
        }
        if (self.trace() - T::one()).abs() > tol {
            return Err(StateError::InvalidDensity(format!(
                "trace {:.6} != 1",
                self.trace().to_f64_lossy()
            )));
        }
        if let Some(min) = self
            .eigenvalues()
            .into_iter()
            .fold(None::<T>, |m, e| Some(m.map_or(e, |m| m.min(e))))
        {
            if min < -tol {
                return Err(StateError::InvalidDensity(format!(
                    "negative eigenvalue {:.3e}",
                    min.to_f64_lossy()
                )));
            }
        }
        Ok(())
    }
}

/// Partial trace of a pure state over every port not in `keep`.
pub fn trace_to_density<T: Scalar>(
    state: &PhotonicState<T>,
    keep: &BTreeSet<Spatial>,
) -> Result<DensityOperator<T>, StateError> {
    let populated = state
        .terms()
        .iter()
        .flat_map(|t| t.occupations().iter().map(|&(m, _)| m.spatial))
        .any(|s| keep.contains(&s));
    if !populated {
        return Err(StateError::EmptyKeepSet);
    }

    // Split every term into (kept part, traced part).
    let mut splits: Vec<(Occupations, Occupations, Complex<T>)> =
        Vec::with_capacity(state.terms().len());
    for t in state.terms() {
        let (kept, traced): (Vec<_>, Vec<_>) = t
            .occupations()
            .iter()
            .copied()
            .partition(|(m, _)| keep.contains(&m.spatial));
        splits.push((kept, traced, t.amplitude()));
    }

    let mut basis: Vec<Occupations> = splits.iter().map(|(k, _, _)| k.clone()).collect();
    basis.sort_unstable();
    basis.dedup();
    let index = |occ: &Occupations| basis.binary_search(occ).expect("basis covers kept parts");

    let n = basis.len();
    let mut matrix = vec![Complex::new(T::zero(), T::zero()); n * n];
    for (ka, ta, aa) in &splits {
        let i = index(ka);
        for (kb, tb, ab) in &splits {
            if ta == tb {
                let j = index(kb);
                matrix[i * n + j] += *aa * ab.conj();
            }
        }
    }
    let rho = DensityOperator { basis, matrix };
    rho.validate()?;
    Ok(rho)
}

/// Overlap `⟨target|ρ|target⟩`.
pub fn fidelity<T: Scalar>(
    rho: &DensityOperator<T>,
    target: &PhotonicState<T>,
) -> Result<T, StateError> {
    let n = rho.dim();
    let mut v = vec![Complex::new(T::zero(), T::zero()); n];
    for t in target.terms() {
        let occ: Occupations = t.occupations().to_vec();
        match rho.basis.binary_search(&occ) {
            Ok(i) => v[i] = t.amplitude(),
            Err(_) => return Err(StateError::BasisMismatch),
        }
    }
    let mut acc = Complex::new(T::zero(), T::zero());
    for i in 0..n {
        for j in 0..n {
            acc += v[i].conj() * rho.entry(i, j) * v[j];
        }
    }
    Ok(acc.re.max(T::zero()).min(T::one() + T::tol()))
}

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations.
/// Dimensions here are tiny (conditional qubit states), so convergence is
/// immediate.
pub fn hermitian_eigenvalues<T: Scalar>(matrix: &[Complex<T>], n: usize) -> Vec<T> {
    if n == 0 {
        return Vec::new();
    }
    let mut a = matrix.to_vec();
    let idx = |r: usize, c: usize| r * n + c;
    for _sweep in 0..60 {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[idx(p, q)].norm());
            }
        }
        if off <= T::tol() * T::from_f64_lossy(1e-3) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[idx(p, q)];
                let mag = apq.norm();
                if mag <= T::drop_eps().sqrt() {
                    continue;
                }
                let phase = apq / Complex::new(mag, T::zero());
                let app = a[idx(p, p)].re;
                let aqq = a[idx(q, q)].re;
                let tau = (aqq - app) / (T::from_f64_lossy(2.0) * mag);
                let t = {
                    let s = if tau >= T::zero() { T::one() } else { -T::one() };
                    s / (tau.abs() + (T::one() + tau * tau).sqrt())
                };
                let c = (T::one() + t * t).sqrt().recip();
                let s = t * c;
                // Column rotation: col_p' = c·col_p − s·phase*·col_q, etc.
                let cs = Complex::new(c, T::zero());
                let sp = phase * Complex::new(s, T::zero());
                for r in 0..n {
                    let arp = a[idx(r, p)];
                    let arq = a[idx(r, q)];
                    a[idx(r, p)] = arp * cs - arq * sp.conj();
                    a[idx(r, q)] = arq * cs + arp * sp;
                }
                for col in 0..n {
                    let apc = a[idx(p, col)];
                    let aqc = a[idx(q, col)];
                    a[idx(p, col)] = apc * cs - aqc * sp;
                    a[idx(q, col)] = aqc * cs + apc * sp.conj();
                }
            }
        }
    }
    (0..n).map(|i| a[idx(i, i)].re).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{FockTerm, Mode};
    use std::f64::consts::FRAC_1_SQRT_2;

    type S = PhotonicState<f64>;

    fn bell_state() -> S {
        let h = Complex::new(FRAC_1_SQRT_2, 0.0);
        S::from_terms(
            vec![
                FockTerm::new(
                    vec![
                        (Mode::ref_tag(Spatial::CharlieE, 0), 1),
                        (Mode::ref_tag(Spatial::BobIn, 0), 1),
                    ],
                    h,
                ),
                FockTerm::new(
                    vec![
                        (Mode::ref_tag(Spatial::CharlieE, 1), 1),
                        (Mode::ref_tag(Spatial::BobIn, 1), 1),
                    ],
                    h,
                ),
            ],
            4,
        )
        .unwrap()
    }

    #[test]
    fn jacobi_matches_known_spectrum() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3.
        let m = vec![
            Complex::new(2.0, 0.0),
            Complex::new(0.0, 1.0),
            Complex::new(0.0, -1.0),
            Complex::new(2.0, 0.0),
        ];
        let mut eigs: Vec<f64> = hermitian_eigenvalues(&m, 2);
        eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((eigs[0] - 1.0).abs() < 1e-9);
        assert!((eigs[1] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn product_state_traces_to_pure_factor() {
        let s = S::single_photon(Mode::ref_tag(Spatial::BobIn, 0))
            .tensor(&S::single_photon(Mode::ref_tag(Spatial::CharlieE, 1)))
            .unwrap();
        let keep: BTreeSet<_> = [Spatial::BobIn].into();
        let rho = trace_to_density(&s, &keep).unwrap();
        assert_eq!(rho.dim(), 1);
        assert!((rho.purity() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bell_state_traces_to_maximally_mixed() {
        let keep: BTreeSet<_> = [Spatial::BobIn].into();
        let rho = trace_to_density(&bell_state(), &keep).unwrap();
        assert_eq!(rho.dim(), 2);
        let mut eigs = rho.eigenvalues();
        eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((eigs[0] - 0.5).abs() < 1e-9);
        assert!((eigs[1] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn empty_keep_set_errors() {
        let keep: BTreeSet<_> = [Spatial::BobDet].into();
        assert!(matches!(
            trace_to_density(&bell_state(), &keep),
            Err(StateError::EmptyKeepSet)
        ));
    }

    #[test]
    fn fidelity_of_pure_state_with_itself() {
        let s = bell_state();
        let keep: BTreeSet<_> = [Spatial::BobIn, Spatial::CharlieE].into();
        let rho = trace_to_density(&s, &keep).unwrap();
        assert!((fidelity(&rho, &s).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn fidelity_of_maximally_mixed_is_half() {
        let keep: BTreeSet<_> = [Spatial::BobIn].into();
        let rho = trace_to_density(&bell_state(), &keep).unwrap();
        let h = Complex::new(FRAC_1_SQRT_2, 0.0);
        let target = S::from_terms(
            vec![
                FockTerm::new(vec![(Mode::ref_tag(Spatial::BobIn, 0), 1)], h),
                FockTerm::new(vec![(Mode::ref_tag(Spatial::BobIn, 1), 1)], h),
            ],
            4,
        )
        .unwrap();
        assert!((fidelity(&rho, &target).unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn fidelity_rejects_foreign_modes() {
        let keep: BTreeSet<_> = [Spatial::BobIn].into();
        let rho = trace_to_density(&bell_state(), &keep).unwrap();
        let target = S::single_photon(Mode::ref_tag(Spatial::BobDet, 0));
        assert!(matches!(
            fidelity(&rho, &target),
            Err(StateError::BasisMismatch)
        ));
    }

    #[test]
    fn v_weighted_mixture_has_expected_fidelity() {
        // ρ = V|ψ⟩⟨ψ| + (1−V)·1/2 gives ⟨ψ|ρ|ψ⟩ = (1+V)/2 = 0.85 at V = 0.7.
        let v = 0.70;
        let h = FRAC_1_SQRT_2;
        let psi = S::from_terms(
            vec![
                FockTerm::new(
                    vec![(Mode::ref_tag(Spatial::BobIn, 0), 1)],
                    Complex::new(h, 0.0),
                ),
                FockTerm::new(
                    vec![(Mode::ref_tag(Spatial::BobIn, 1), 1)],
                    Complex::new(0.0, h),
                ),
            ],
            4,
        )
        .unwrap();
        let b0: Occupations = vec![(Mode::ref_tag(Spatial::BobIn, 0), 1)];
        let b1: Occupations = vec![(Mode::ref_tag(Spatial::BobIn, 1), 1)];
        let mut basis = vec![b0, b1];
        basis.sort_unstable();
        let mut matrix = vec![Complex::new(0.0, 0.0); 4];
        let amps = [psi.terms()[0].amplitude(), psi.terms()[1].amplitude()];
        for i in 0..2 {
            for j in 0..2 {
                matrix[i * 2 + j] = amps[i] * amps[j].conj() * v;
            }
            matrix[i * 2 + i] += Complex::new((1.0 - v) / 2.0, 0.0);
        }
        let rho = DensityOperator { basis, matrix };
        rho.validate().unwrap();
        assert!((fidelity(&rho, &psi).unwrap() - 0.85).abs() < 1e-9);
    }
}

//! Pointwise linear algebra of (partially) cosymplectic structures on
//! `T*Q × R`.
//!
//! Coordinates are always ordered `(q^1..q^n, p_1..p_n, S)`. A two-form is
//! stored as an antisymmetric matrix `W` with `ω(u, w) = uᵀ W w`, so the
//! contraction `ι_v ω` has coefficients `Wᵀ v`. The flat map
//! `v ↦ ι_v ω + η(v) η` is therefore the matrix `Wᵀ + η ηᵀ`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;

/// Matrix of the canonical presymplectic form `dq^i ∧ dp_i` on `T*Q × R`.
pub fn canonical_omega(n: usize) -> DMatrix<f64> {
    let mut w = DMatrix::zeros(2 * n + 1, 2 * n + 1);
    for i in 0..n {
        w[(i, n + i)] = 1.0;
        w[(n + i, i)] = -1.0;
    }
    w
}

/// The pair `(ω, η)` evaluated at a single point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointStructure {
    w: DMatrix<f64>,
    eta: DVector<f64>,
}

impl PointStructure {
    pub fn new(w: DMatrix<f64>, eta: DVector<f64>) -> Result<Self> {
        let dim = eta.len();
        if dim.is_multiple_of(2) || w.nrows() != dim || w.ncols() != dim {
            return Err(Error::Config(format!(
                "structure needs an odd dimension with matching shapes, got {}x{} and {}",
                w.nrows(),
                w.ncols(),
                dim
            )));
        }
        if linalg::max_abs(&(&w + w.transpose())) > 1e-14 {
            return Err(Error::Config("two-form matrix is not antisymmetric".into()));
        }
        Ok(Self { w, eta })
    }

    /// Canonical `ω` paired with an arbitrary one-form.
    pub fn canonical(n: usize, eta: DVector<f64>) -> Result<Self> {
        Self::new(canonical_omega(n), eta)
    }

    pub fn dim(&self) -> usize {
        self.eta.len()
    }

    pub fn n(&self) -> usize {
        self.dim() / 2
    }

    pub fn omega(&self) -> &DMatrix<f64> {
        &self.w
    }

    pub fn eta(&self) -> &DVector<f64> {
        &self.eta
    }

    /// Coefficients of `ι_v ω`.
    pub fn contract(&self, v: &DVector<f64>) -> DVector<f64> {
        self.w.tr_mul(v)
    }

    pub fn flat_matrix(&self) -> DMatrix<f64> {
        self.w.transpose() + &self.eta * self.eta.transpose()
    }

    pub fn flat(&self, v: &DVector<f64>) -> DVector<f64> {
        self.contract(v) + &self.eta * self.eta.dot(v)
    }

    /// Solves `flat(v) = alpha`.
    pub fn sharp(&self, alpha: &DVector<f64>) -> Result<DVector<f64>> {
        linalg::solve(&self.flat_matrix(), alpha, "flat").map_err(|_| Error::DegenerateStructure)
    }

    pub fn is_almost_cosymplectic(&self) -> bool {
        linalg::is_invertible(&self.flat_matrix())
    }

    /// The Reeb field: `ι_R ω = 0`, `η(R) = 1`.
    pub fn reeb_field(&self) -> Result<DVector<f64>> {
        self.sharp(&self.eta)
    }
}

/// Data of a Hamiltonian thermodynamic system at one point of `T*Q × R`.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianPoint {
    pub q: DVector<f64>,
    pub p: DVector<f64>,
    pub s: f64,
    /// `(∂H/∂q, ∂H/∂p, ∂H/∂S)`.
    pub dh: DVector<f64>,
    /// Friction coefficients `F^fr_i`.
    pub friction: DVector<f64>,
    /// External force coefficients `F^ext_i`.
    pub external: DVector<f64>,
}

impl HamiltonianPoint {
    pub fn n(&self) -> usize {
        self.q.len()
    }

    pub fn dh_dq(&self) -> DVector<f64> {
        self.dh.rows(0, self.n()).into_owned()
    }

    pub fn dh_dp(&self) -> DVector<f64> {
        self.dh.rows(self.n(), self.n()).into_owned()
    }

    pub fn dh_ds(&self) -> f64 {
        self.dh[2 * self.n()]
    }

    /// `F^ext` as a covector on `T*Q × R` (semibasic: only `dq` terms).
    fn external_form(&self) -> DVector<f64> {
        let n = self.n();
        let mut f = DVector::zeros(2 * n + 1);
        f.rows_mut(0, n).copy_from(&self.external);
        f
    }
}

/// Builds `(ω, η)` with `η = -∂H/∂S dS - F^fr_i dq^i` and canonical `ω`.
pub fn assemble_structure(pt: &HamiltonianPoint) -> Result<PointStructure> {
    let n = pt.n();
    let dh_ds = pt.dh_ds();
    if dh_ds == 0.0 || !dh_ds.is_finite() {
        return Err(Error::ZeroTemperature(dh_ds));
    }
    let mut eta = DVector::zeros(2 * n + 1);
    for i in 0..n {
        eta[i] = -pt.friction[i];
    }
    eta[2 * n] = -dh_ds;
    PointStructure::canonical(n, eta)
}

/// Forced evolution field `E = flat⁻¹(dH + η - F^ext)`.
pub fn evolution_field(s: &PointStructure, pt: &HamiltonianPoint) -> Result<DVector<f64>> {
    let rhs = &pt.dh + s.eta() - pt.external_form();
    s.sharp(&rhs)
}

/// The same field from its closed coordinate expression.
pub fn evolution_field_coordinates(pt: &HamiltonianPoint) -> Result<DVector<f64>> {
    let n = pt.n();
    let dh_ds = pt.dh_ds();
    if dh_ds == 0.0 {
        return Err(Error::ZeroTemperature(dh_ds));
    }
    let hp = pt.dh_dp();
    let hq = pt.dh_dq();
    let mut e = DVector::zeros(2 * n + 1);
    e.rows_mut(0, n).copy_from(&hp);
    e.rows_mut(n, n)
        .copy_from(&(&pt.friction + &pt.external - hq));
    e[2 * n] = -hp.dot(&pt.friction) / dh_ds;
    Ok(e)
}

/// Contact evolution field `Y_H` for the contact form `dS - p_i dq^i`.
pub fn contact_evolution_field(p: &DVector<f64>, dh: &DVector<f64>) -> DVector<f64> {
    let n = p.len();
    let hq = dh.rows(0, n);
    let hp = dh.rows(n, n);
    let hs = dh[2 * n];
    let mut y = DVector::zeros(2 * n + 1);
    y.rows_mut(0, n).copy_from(&hp);
    y.rows_mut(n, n).copy_from(&(-(hq + p * hs)));
    y[2 * n] = p.dot(&hp);
    y
}

/// Friction `F^fr_i = -p_i ∂H/∂S` that turns the evolution field into `Y_H`.
pub fn contact_friction(p: &DVector<f64>, dh: &DVector<f64>) -> DVector<f64> {
    let hs = dh[2 * p.len()];
    -p * hs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(x)
    }

    /// Oscillator `H = p²/2 + q²/2 + γS` with `F^fr = -γp`.
    fn oscillator_point(q: f64, p: f64, s: f64, gamma: f64) -> HamiltonianPoint {
        HamiltonianPoint {
            q: v(&[q]),
            p: v(&[p]),
            s,
            dh: v(&[q, p, gamma]),
            friction: v(&[-gamma * p]),
            external: v(&[0.0]),
        }
    }

    #[test]
    fn eta_from_oscillator_point() {
        let s = assemble_structure(&oscillator_point(1.0, 2.0, 0.0, 0.1)).unwrap();
        let want = [0.2, 0.0, -0.1];
        for (a, b) in s.eta().iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(s.omega(), &canonical_omega(1));
    }

    #[test]
    fn frictionless_structure_is_cosymplectic() {
        let pt = HamiltonianPoint {
            q: v(&[0.3, 0.4]),
            p: v(&[1.0, -1.0]),
            s: 0.0,
            dh: v(&[0.0, 0.0, 0.0, 0.0, 1.0]),
            friction: v(&[0.0, 0.0]),
            external: v(&[0.0, 0.0]),
        };
        let s = assemble_structure(&pt).unwrap();
        assert_eq!(s.eta().as_slice(), &[0.0, 0.0, 0.0, 0.0, -1.0]);
    }

    #[test]
    fn zero_temperature_rejected() {
        let pt = oscillator_point(1.0, 2.0, 0.0, 0.0);
        assert!(matches!(
            assemble_structure(&pt),
            Err(Error::ZeroTemperature(_))
        ));
    }

    #[test]
    fn canonical_flat_matrix() {
        let s = PointStructure::canonical(1, v(&[0.0, 0.0, 1.0])).unwrap();
        let want = DMatrix::from_row_slice(3, 3, &[0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(s.flat_matrix(), want);
        // flat(∂q) = dp and flat(∂p) = -dq
        assert_eq!(s.flat(&v(&[1.0, 0.0, 0.0])).as_slice(), &[0.0, 1.0, 0.0]);
        assert_eq!(s.flat(&v(&[0.0, 1.0, 0.0])).as_slice(), &[-1.0, 0.0, 0.0]);
    }

    #[test]
    fn oscillator_flat_is_invertible() {
        let s = assemble_structure(&oscillator_point(1.0, 2.0, 0.0, 0.1)).unwrap();
        // eta = (0.2, 0, -0.1):  [[0.04, -1, -0.02], [1, 0, 0], [-0.02, 0, 0.01]]
        // det = 1 * (-1)(-1) * 0.01 expansion -> 0.01
        let det = s.flat_matrix().determinant();
        assert!((det - 0.01).abs() < 1e-15, "det = {det}");
        assert!(s.is_almost_cosymplectic());
    }

    #[test]
    fn zero_eta_is_degenerate() {
        let s = PointStructure::canonical(1, v(&[0.0, 0.0, 0.0])).unwrap();
        assert!(!s.is_almost_cosymplectic());
        assert_eq!(s.reeb_field(), Err(Error::DegenerateStructure));
    }

    #[test]
    fn reeb_fields() {
        let s = PointStructure::canonical(1, v(&[0.0, 0.0, 1.0])).unwrap();
        assert_eq!(s.reeb_field().unwrap().as_slice(), &[0.0, 0.0, 1.0]);

        let s = assemble_structure(&oscillator_point(1.0, 2.0, 0.0, 0.1)).unwrap();
        let r = s.reeb_field().unwrap();
        assert!(r[0].abs() < 1e-12 && r[1].abs() < 1e-12);
        assert!((r[2] + 10.0).abs() < 1e-12);
        assert!(linalg::max_abs_vec(&s.contract(&r)) <= 1e-12);
        assert!((s.eta().dot(&r) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn frictionless_evolution_field() {
        let pt = HamiltonianPoint {
            friction: v(&[0.0]),
            ..oscillator_point(0.7, -0.3, 2.0, 0.1)
        };
        let s = assemble_structure(&pt).unwrap();
        let e = evolution_field(&s, &pt).unwrap();
        let want = [-0.3, -0.7, 0.0];
        for (a, b) in e.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn evolution_field_routes_agree() {
        let pt = HamiltonianPoint {
            external: v(&[0.25]),
            ..oscillator_point(0.7, -0.3, 2.0, 0.1)
        };
        let s = assemble_structure(&pt).unwrap();
        let e = evolution_field(&s, &pt).unwrap();
        let c = evolution_field_coordinates(&pt).unwrap();
        assert!(linalg::max_abs_vec(&(&e - &c)) < 1e-12);
        assert!(s.eta().dot(&e).abs() < 1e-12);
    }

    #[test]
    fn contact_case_matches_herglotz_field() {
        let p = v(&[0.4, -1.3]);
        let dh = v(&[0.2, 1.1, 0.4, -1.3, 0.7]);
        let pt = HamiltonianPoint {
            q: v(&[0.1, 0.2]),
            p: p.clone(),
            s: 0.5,
            dh: dh.clone(),
            friction: contact_friction(&p, &dh),
            external: v(&[0.0, 0.0]),
        };
        let s = assemble_structure(&pt).unwrap();
        let e = evolution_field(&s, &pt).unwrap();
        let y = contact_evolution_field(&p, &dh);
        assert!(linalg::max_abs_vec(&(e - y)) < 1e-12);
    }

    #[test]
    fn rejects_malformed_structures() {
        assert!(PointStructure::new(DMatrix::zeros(2, 2), v(&[0.0, 1.0])).is_err());
        let sym = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(PointStructure::new(sym, v(&[0.0, 0.0, 1.0])).is_err());
    }
}

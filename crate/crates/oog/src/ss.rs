//! State-space system representation, validation, and complex
//! frequency-response evaluation.

use faer::{Mat, MatRef, c64};

use crate::error::{Error, Result};
use crate::linalg;

fn check_finite(name: &'static str, m: MatRef<'_, f64>) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if !m[(i, j)].is_finite() {
                return Err(Error::NonFinite {
                    name,
                    row: i,
                    col: j,
                });
            }
        }
    }
    Ok(())
}

/// A continuous-time linear system ẋ = Ax + Bu, y = Cx + Du.
#[derive(Debug, Clone)]
pub struct StateSpace {
    a: Mat<f64>,
    b: Mat<f64>,
    c: Mat<f64>,
    d: Mat<f64>,
}

impl StateSpace {
    pub fn new(a: Mat<f64>, b: Mat<f64>, c: Mat<f64>, d: Mat<f64>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "A must be square, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        if b.nrows() != n {
            return Err(Error::DimensionMismatch(format!(
                "B has {} rows, expected {n}",
                b.nrows()
            )));
        }
        if c.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "C has {} columns, expected {n}",
                c.ncols()
            )));
        }
        if d.nrows() != c.nrows() || d.ncols() != b.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "D is {}x{}, expected {}x{}",
                d.nrows(),
                d.ncols(),
                c.nrows(),
                b.ncols()
            )));
        }
        check_finite("A", a.as_ref())?;
        check_finite("B", b.as_ref())?;
        check_finite("C", c.as_ref())?;
        check_finite("D", d.as_ref())?;
        Ok(Self { a, b, c, d })
    }

    pub fn a(&self) -> MatRef<'_, f64> {
        self.a.as_ref()
    }
    pub fn b(&self) -> MatRef<'_, f64> {
        self.b.as_ref()
    }
    pub fn c(&self) -> MatRef<'_, f64> {
        self.c.as_ref()
    }
    pub fn d(&self) -> MatRef<'_, f64> {
        self.d.as_ref()
    }

    pub fn nstates(&self) -> usize {
        self.a.nrows()
    }
    pub fn ninputs(&self) -> usize {
        self.b.ncols()
    }
    pub fn noutputs(&self) -> usize {
        self.c.nrows()
    }

    /// Frequency response G(iω) = C (iωI - A)⁻¹ B + D, computed by solving
    /// the linear system (iωI - A) X = B, never by explicit inversion.
    pub fn freq_response(&self, omega: f64) -> Result<Mat<c64>> {
        let x = linalg::resolvent_solve(self.a.as_ref(), self.b.as_ref(), omega)?;
        let cx = linalg::to_complex(self.c.as_ref());
        Ok(&cx * &x + linalg::to_complex(self.d.as_ref()))
    }
}

/// Largest real part over the eigenvalues of A.
pub fn spectral_abscissa(a: MatRef<'_, f64>) -> Result<f64> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "spectral abscissa needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    check_finite("A", a)?;
    let ev = linalg::eigenvalues(a)?;
    Ok(ev.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max))
}

/// Scale-aware stability margin: τ·(1 + ‖A‖_F).
pub fn stability_margin(a: MatRef<'_, f64>, tau_stab: f64) -> f64 {
    tau_stab * (1.0 + a.norm_l2())
}

/// A system Σ = (A, B) observed through a performance output
/// y_p = C_p x + D_p u and a residual output y_r = C_r x + D_r u.
#[derive(Debug, Clone)]
pub struct TwoOutputPlant {
    a: Mat<f64>,
    b: Mat<f64>,
    cp: Mat<f64>,
    dp: Mat<f64>,
    cr: Mat<f64>,
    dr: Mat<f64>,
}

impl TwoOutputPlant {
    pub fn new(
        a: Mat<f64>,
        b: Mat<f64>,
        cp: Mat<f64>,
        dp: Mat<f64>,
        cr: Mat<f64>,
        dr: Mat<f64>,
    ) -> Result<Self> {
        let n = a.nrows();
        let m = b.ncols();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "A must be square, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        if b.nrows() != n {
            return Err(Error::DimensionMismatch(format!(
                "B has {} rows, expected {n}",
                b.nrows()
            )));
        }
        for (name, c, d) in
            [("Cp/Dp", (&cp, &dp)), ("Cr/Dr", (&cr, &dr))].map(|(name, (c, d))| (name, c, d))
        {
            if c.ncols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "{name}: C has {} columns, expected {n}",
                    c.ncols()
                )));
            }
            if d.nrows() != c.nrows() || d.ncols() != m {
                return Err(Error::DimensionMismatch(format!(
                    "{name}: D is {}x{}, expected {}x{m}",
                    d.nrows(),
                    d.ncols(),
                    c.nrows()
                )));
            }
        }
        check_finite("A", a.as_ref())?;
        check_finite("B", b.as_ref())?;
        check_finite("Cp", cp.as_ref())?;
        check_finite("Dp", dp.as_ref())?;
        check_finite("Cr", cr.as_ref())?;
        check_finite("Dr", dr.as_ref())?;
        Ok(Self {
            a,
            b,
            cp,
            dp,
            cr,
            dr,
        })
    }

    pub fn a(&self) -> MatRef<'_, f64> {
        self.a.as_ref()
    }
    pub fn b(&self) -> MatRef<'_, f64> {
        self.b.as_ref()
    }
    pub fn cp(&self) -> MatRef<'_, f64> {
        self.cp.as_ref()
    }
    pub fn dp(&self) -> MatRef<'_, f64> {
        self.dp.as_ref()
    }
    pub fn cr(&self) -> MatRef<'_, f64> {
        self.cr.as_ref()
    }
    pub fn dr(&self) -> MatRef<'_, f64> {
        self.dr.as_ref()
    }

    pub fn nstates(&self) -> usize {
        self.a.nrows()
    }
    pub fn ninputs(&self) -> usize {
        self.b.ncols()
    }
    pub fn n_performance(&self) -> usize {
        self.cp.nrows()
    }
    pub fn n_residual(&self) -> usize {
        self.cr.nrows()
    }

    /// The performance channel as a standalone system.
    pub fn performance_system(&self) -> StateSpace {
        StateSpace {
            a: self.a.clone(),
            b: self.b.clone(),
            c: self.cp.clone(),
            d: self.dp.clone(),
        }
    }

    /// The residual channel as a standalone system.
    pub fn residual_system(&self) -> StateSpace {
        StateSpace {
            a: self.a.clone(),
            b: self.b.clone(),
            c: self.cr.clone(),
            d: self.dr.clone(),
        }
    }

    /// Verifies that A is Hurwitz with the scale-aware margin τ·(1 + ‖A‖_F).
    /// Returns the spectral abscissa on success.
    pub fn check_hurwitz(&self, tau_stab: f64) -> Result<f64> {
        let abscissa = spectral_abscissa(self.a.as_ref())?;
        let margin = stability_margin(self.a.as_ref(), tau_stab);
        if abscissa > -margin {
            return Err(Error::NotStable { abscissa, margin });
        }
        Ok(abscissa)
    }

    /// Both frequency responses (G_p(iω), G_r(iω)) from a single resolvent
    /// solve.
    pub fn freq_responses(&self, omega: f64) -> Result<(Mat<c64>, Mat<c64>)> {
        let x = linalg::resolvent_solve(self.a.as_ref(), self.b.as_ref(), omega)?;
        let gp = linalg::to_complex(self.cp.as_ref()) * &x + linalg::to_complex(self.dp.as_ref());
        let gr = linalg::to_complex(self.cr.as_ref()) * &x + linalg::to_complex(self.dr.as_ref());
        Ok((gp, gr))
    }
}

/// Repeated-evaluation frequency response backed by a one-time Hessenberg
/// reduction of A; each evaluation then costs O(n²(1+m)) instead of O(n³).
///
/// Produces the same values as [`TwoOutputPlant::freq_responses`] up to
/// roundoff.
pub struct FreqEvaluator {
    hess: Mat<f64>,
    b_q: Mat<f64>,
    cp_q: Mat<f64>,
    cr_q: Mat<f64>,
    dp: Mat<c64>,
    dr: Mat<c64>,
}

impl FreqEvaluator {
    pub fn new(plant: &TwoOutputPlant) -> Self {
        let (hess, q) = linalg::hessenberg(plant.a());
        FreqEvaluator {
            hess,
            b_q: q.transpose() * plant.b(),
            cp_q: plant.cp() * &q,
            cr_q: plant.cr() * &q,
            dp: linalg::to_complex(plant.dp()),
            dr: linalg::to_complex(plant.dr()),
        }
    }

    pub fn responses(&self, omega: f64) -> Result<(Mat<c64>, Mat<c64>)> {
        let x = linalg::hessenberg_resolvent_solve(self.hess.as_ref(), self.b_q.as_ref(), omega)?;
        let gp = linalg::to_complex(self.cp_q.as_ref()) * &x + &self.dp;
        let gr = linalg::to_complex(self.cr_q.as_ref()) * &x + &self.dr;
        Ok((gp, gr))
    }
}

//! Flat square torus X = ℂ/(ℤ+iℤ) sampled on an n×n grid, with Fourier
//! differentiation.
//!
//! Conventions: z = x + iy, ω = dx∧dy = (i/2) dz∧dz̄, ∫_X ω = 1,
//! ∂ = ½(∂_x − i∂_y), ∂̄ = ½(∂_x + i∂_y), Λ(dz∧dz̄) = −2i, Λω = 1.

use super::{Field, FormType};
use crate::{CMat, Error, Result, C64};
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

#[derive(Clone)]
pub struct TorusGrid {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for TorusGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TorusGrid").field("n", &self.n).finish()
    }
}

impl PartialEq for TorusGrid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
    }
}

/// Spectral multipliers understood by [`TorusGrid::apply`].
#[derive(Clone, Copy, Debug)]
enum Symbol {
    Dx,
    Dy,
    Del,
    Dbar,
    Laplace,
}

impl TorusGrid {
    pub fn new(n: usize) -> Result<TorusGrid> {
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::Resolution(format!("torus grid needs even n >= 4, got {n}")));
        }
        let mut planner = FftPlanner::new();
        Ok(TorusGrid { n, forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Scale of ω relative to dx∧dy; the unit square already has area 1.
    pub fn kahler_normalization(&self) -> f64 {
        1.0
    }

    /// Quadrature weight of a single grid cell against ω.
    pub fn cell_weight(&self) -> f64 {
        self.kahler_normalization() / self.len() as f64
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.n + ix
    }

    pub fn coords(&self, idx: usize) -> (f64, f64) {
        let h = self.spacing();
        ((idx % self.n) as f64 * h, (idx / self.n) as f64 * h)
    }

    /// Grid points in storage order.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.len()).map(move |i| self.coords(i))
    }

    /// Signed wavenumber of FFT bin `j`, and whether it is the Nyquist bin.
    fn wavenumber(&self, j: usize) -> (f64, bool) {
        let n = self.n;
        if j < n / 2 {
            (j as f64, false)
        } else if j == n / 2 {
            (-(n as f64) / 2.0, true)
        } else {
            (j as f64 - n as f64, false)
        }
    }

    fn fft2(&self, buf: &mut [C64], inverse: bool) {
        let n = self.n;
        let plan = if inverse { &self.inverse } else { &self.forward };
        plan.process(buf);
        let mut t = vec![C64::new(0.0, 0.0); n * n];
        for r in 0..n {
            for c in 0..n {
                t[c * n + r] = buf[r * n + c];
            }
        }
        plan.process(&mut t);
        for r in 0..n {
            for c in 0..n {
                buf[c * n + r] = t[r * n + c];
            }
        }
        if inverse {
            let s = 1.0 / (n * n) as f64;
            buf.iter_mut().for_each(|z| *z *= s);
        }
    }

    /// Multiply every matrix entry of `f` in Fourier space by `m(kx, ky, nyq_x, nyq_y)`.
    pub fn apply_multiplier<M>(&self, f: &Field, m: M) -> Vec<CMat>
    where
        M: Fn(f64, f64, bool, bool) -> C64,
    {
        let n = self.n;
        let mut mult = vec![C64::new(0.0, 0.0); n * n];
        for jy in 0..n {
            let (ky, ny) = self.wavenumber(jy);
            for jx in 0..n {
                let (kx, nx) = self.wavenumber(jx);
                mult[jy * n + jx] = m(kx, ky, nx, ny);
            }
        }
        let mut out = vec![CMat::zeros(f.rows, f.cols); f.len()];
        let mut buf = vec![C64::new(0.0, 0.0); n * n];
        for r in 0..f.rows {
            for c in 0..f.cols {
                for (b, v) in buf.iter_mut().zip(&f.values) {
                    *b = v[(r, c)];
                }
                self.fft2(&mut buf, false);
                for (b, s) in buf.iter_mut().zip(&mult) {
                    *b *= s;
                }
                self.fft2(&mut buf, true);
                for (o, b) in out.iter_mut().zip(&buf) {
                    o[(r, c)] = *b;
                }
            }
        }
        out
    }

    fn apply(&self, f: &Field, sym: Symbol) -> Vec<CMat> {
        let tpi = 2.0 * PI;
        let odd = |k: f64, nyq: bool| if nyq { 0.0 } else { k };
        self.apply_multiplier(f, |kx, ky, nx, ny| {
            let (ox, oy) = (odd(kx, nx), odd(ky, ny));
            match sym {
                Symbol::Dx => C64::new(0.0, tpi * ox),
                Symbol::Dy => C64::new(0.0, tpi * oy),
                // ½(2πi kx ± i·2πi ky)
                Symbol::Del => C64::new(PI * oy, PI * ox),
                Symbol::Dbar => C64::new(-PI * oy, PI * ox),
                Symbol::Laplace => C64::new(-tpi * tpi * (kx * kx + ky * ky), 0.0),
            }
        })
    }

    fn check_grid(&self, f: &Field) -> Result<()> {
        if f.n != self.n {
            return Err(Error::Shape(format!("field on n={} used with grid n={}", f.n, self.n)));
        }
        Ok(())
    }

    /// dz̄-coefficient of ∂̄f for a function f.
    pub fn dbar(&self, f: &Field) -> Result<Field> {
        f.require_form(FormType::Function)?;
        self.check_grid(f)?;
        Ok(Field { values: self.apply(f, Symbol::Dbar), form: FormType::ZeroOne, ..f.clone() })
    }

    /// dz-coefficient of ∂f for a function f.
    pub fn del(&self, f: &Field) -> Result<Field> {
        f.require_form(FormType::Function)?;
        self.check_grid(f)?;
        Ok(Field { values: self.apply(f, Symbol::Del), form: FormType::OneZero, ..f.clone() })
    }

    /// ∂_z of a coefficient field regardless of its form label (the result
    /// keeps the label of the input).
    pub fn del_coeff(&self, f: &Field) -> Field {
        Field { values: self.apply(f, Symbol::Del), ..f.clone() }
    }

    /// ∂_z̄ of a coefficient field regardless of its form label.
    pub fn dbar_coeff(&self, f: &Field) -> Field {
        Field { values: self.apply(f, Symbol::Dbar), ..f.clone() }
    }

    pub fn dx(&self, f: &Field) -> Field {
        Field { values: self.apply(f, Symbol::Dx), ..f.clone() }
    }

    pub fn dy(&self, f: &Field) -> Field {
        Field { values: self.apply(f, Symbol::Dy), ..f.clone() }
    }

    /// ∂_x² + ∂_y² of a function.
    pub fn laplace(&self, f: &Field) -> Result<Field> {
        f.require_form(FormType::Function)?;
        self.check_grid(f)?;
        Ok(Field { values: self.apply(f, Symbol::Laplace), ..f.clone() })
    }

    /// ∫_X f ω. Functions integrate directly; a (1,1)-form c·dz∧dz̄
    /// integrates as −2i·c against dx∧dy.
    pub fn integrate(&self, f: &Field) -> Result<CMat> {
        self.check_grid(f)?;
        let scale = match f.form {
            FormType::Function => C64::new(1.0, 0.0),
            FormType::OneOne => C64::new(0.0, -2.0),
            other => return Err(Error::FormType { expected: "function or (1,1)-form".into(), got: other.to_string() }),
        };
        let mut acc = CMat::zeros(f.rows, f.cols);
        for v in &f.values {
            acc += v;
        }
        Ok(acc * (scale * self.cell_weight()))
    }

    /// Λ of a (1,1)-form: c·dz∧dz̄ ↦ −2i·c.
    pub fn lambda_contract(&self, f: &Field) -> Result<Field> {
        f.require_form(FormType::OneOne)?;
        Ok(f.scale(C64::new(0.0, -2.0)).with_form(FormType::Function))
    }

    /// f ↦ f·ω as a (1,1)-form (coefficient i/2 on dz∧dz̄).
    pub fn wedge_omega(&self, f: &Field) -> Result<Field> {
        f.require_form(FormType::Function)?;
        Ok(f.scale(C64::new(0.0, 0.5)).with_form(FormType::OneOne))
    }

    /// The Kähler form ω itself as an r×r (1,1)-form field ω·Id.
    pub fn omega(&self, r: usize) -> Field {
        Field::constant(self, &(CMat::identity(r, r) * C64::new(0.0, 0.5)), FormType::OneOne)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mode(grid: &TorusGrid, kx: f64, ky: f64) -> Field {
        Field::from_fn(grid, 1, 1, FormType::Function, |x, y| {
            let a = 2.0 * PI * (kx * x + ky * y);
            CMat::from_element(1, 1, C64::new(a.cos(), a.sin()))
        })
    }

    /// Fourth-order central difference in x, used as an independent check.
    fn fd_dx(grid: &TorusGrid, f: &Field) -> Vec<C64> {
        let n = grid.n();
        let h = grid.spacing();
        (0..grid.len())
            .map(|i| {
                let (ix, iy) = (i % n, i / n);
                let at = |d: isize| {
                    let j = (ix as isize + d).rem_euclid(n as isize) as usize;
                    f.values[grid.index(j, iy)][(0, 0)]
                };
                (at(-2) - at(-1) * 8.0 + at(1) * 8.0 - at(2)) / (12.0 * h)
            })
            .collect()
    }

    #[test]
    fn rejects_bad_resolution() {
        assert!(TorusGrid::new(3).is_err());
        assert!(TorusGrid::new(7).is_err());
        assert!(TorusGrid::new(4).is_ok());
    }

    #[test]
    fn dbar_of_constant_vanishes() {
        let g = TorusGrid::new(8).unwrap();
        let c = CMat::from_fn(2, 2, |i, j| C64::new(i as f64, j as f64));
        let f = Field::constant(&g, &c, FormType::Function);
        assert!(g.dbar(&f).unwrap().sup_norm() < 1e-13);
    }

    #[test]
    fn dbar_of_x_mode() {
        let g = TorusGrid::new(16).unwrap();
        let f = mode(&g, 1.0, 0.0);
        let d = g.dbar(&f).unwrap();
        assert_eq!(d.form, FormType::ZeroOne);
        for (v, w) in d.values.iter().zip(&f.values) {
            let expect = w[(0, 0)] * C64::new(0.0, PI);
            assert!((v[(0, 0)] - expect).norm() < 1e-12);
        }
        // the stencil agrees with ½∂_x applied to the mode (∂_y vanishes)
        let fd = fd_dx(&g, &f);
        for (v, s) in d.values.iter().zip(&fd) {
            assert!((v[(0, 0)] - s * 0.5).norm() < 2e-2);
        }
    }

    #[test]
    fn dbar_symbol_on_mixed_mode() {
        // ∂̄ e(kx, ky) = πi(kx + i ky)·e; only k = 0 is annihilated, so the
        // periodic holomorphic functions are exactly the constants
        let g = TorusGrid::new(8).unwrap();
        let f = mode(&g, 2.0, 1.0);
        let d = g.dbar(&f).unwrap();
        let expect = C64::new(0.0, PI) * C64::new(2.0, 1.0);
        for (v, w) in d.values.iter().zip(&f.values) {
            assert!((v[(0, 0)] - w[(0, 0)] * expect).norm() < 1e-12);
        }
    }

    #[test]
    fn laplace_eigenvalue() {
        let g = TorusGrid::new(16).unwrap();
        let f = mode(&g, 1.0, 0.0);
        let l = g.laplace(&f).unwrap();
        for (v, w) in l.values.iter().zip(&f.values) {
            assert!((v[(0, 0)] + w[(0, 0)] * (4.0 * PI * PI)).norm() < 1e-10);
        }
    }

    #[test]
    fn laplace_is_four_del_dbar() {
        let g = TorusGrid::new(16).unwrap();
        let f = Field::from_fn(&g, 1, 1, FormType::Function, |x, y| {
            CMat::from_element(1, 1, C64::new((2.0 * PI * x).sin() * (4.0 * PI * y).cos(), 0.0))
        });
        let dd = g.del_coeff(&g.dbar(&f).unwrap()).scale(C64::new(4.0, 0.0));
        let l = g.laplace(&f).unwrap();
        assert!(dd.sub(&l.with_form(FormType::ZeroOne)).sup_norm() < 1e-9);
    }

    #[test]
    fn product_of_modes_differentiates_exactly() {
        let g = TorusGrid::new(16).unwrap();
        let a = mode(&g, 1.0, 2.0);
        let b = mode(&g, -3.0, 1.0);
        let p = a.mul(&b, FormType::Function);
        let d = g.del(&p).unwrap();
        // product is the (−2, 3) mode: ∂ symbol πi(kx − i ky)
        let sym = C64::new(0.0, PI) * C64::new(-2.0, -3.0);
        for (v, w) in d.values.iter().zip(&p.values) {
            let e = w[(0, 0)] * sym;
            assert!((v[(0, 0)] - e).norm() <= 1e-10 * e.norm());
        }
    }

    #[test]
    fn integrate_and_contract() {
        let g = TorusGrid::new(8).unwrap();
        let one = Field::constant(&g, &CMat::identity(1, 1), FormType::Function);
        assert!((g.integrate(&one).unwrap()[(0, 0)] - 1.0).norm() < 1e-14);
        let om = g.omega(1);
        assert!((g.integrate(&om).unwrap()[(0, 0)] - 1.0).norm() < 1e-14);
        let l = g.lambda_contract(&om).unwrap();
        assert!(l.sub(&one).sup_norm() < 1e-15);
        let f = mode(&g, 1.0, 1.0);
        let back = g.lambda_contract(&g.wedge_omega(&f).unwrap()).unwrap();
        assert!(back.sub(&f).sup_norm() < 1e-15);
    }

    #[test]
    fn form_type_errors() {
        let g = TorusGrid::new(8).unwrap();
        let f = Field::zeros(&g, 1, 1, FormType::OneZero);
        assert!(matches!(g.dbar(&f), Err(Error::FormType { .. })));
        assert!(g.lambda_contract(&f).is_err());
    }
}

//! Faedo-Galerkin reference system on trigonometric eigenbases.
//!
//! The phase field is expanded in the real orthonormal basis
//! `1/sqrt|Q|`, `sqrt(2/|Q|) cos(k.x)`, `sqrt(2/|Q|) sin(k.x)` and the velocity in
//! the Stokes eigenfunctions `e sqrt(2/|Q|) cos(k.x)`, `e sqrt(2/|Q|) sin(k.x)` with
//! `e` perpendicular to `k`. Wavevectors `j` range over the cube `|j_i| <= K`,
//! one representative of each `+-j` pair, ordered by `|j|^2` and then lexicographically.
//!
//! Inner products with basis functions are computed by quadrature on a grid of
//! `N > 4K` points per axis, where every product that appears is integrated exactly
//! when the coefficients are polynomial. Basis derivatives are analytic. The code
//! shares nothing with the pseudo-spectral solver beyond the FFT.

use std::sync::Arc;

use crate::diagnostics::{LedgerRow, NormMonitor};
use crate::error::{Error, Result};
use crate::io::noise::perpendicular_directions;
use crate::model::{PhysParams, State};
use crate::spectral::{Complex64, Grid, GridSpec, ScalarField, VectorField};

mod quad;
use quad::BandFft;

/// Largest supported number of retained modes per axis.
pub const MAX_MODES: usize = 8;

#[derive(Debug, Clone)]
struct Wave {
    j: Vec<i64>,
    k: Vec<f64>,
    ksq: f64,
    /// Flat indices of `+j` and `-j` on the quadrature grid.
    plus: usize,
    minus: usize,
}

/// Coefficients of `alpha * cos + beta * sin` for one wave, in basis units.
#[derive(Debug, Clone, Copy, Default)]
struct Pair {
    alpha: f64,
    beta: f64,
}

impl Pair {
    /// Coefficients of the partial derivative along `k_a`.
    fn derivative(self, ka: f64) -> Pair {
        Pair {
            alpha: ka * self.beta,
            beta: -ka * self.alpha,
        }
    }
}

/// The assembled Galerkin ODE `y' = G(y)` with `y = (a, b)`.
#[derive(Debug, Clone)]
pub struct GalerkinSystem {
    pub n_modes: usize,
    pub params: PhysParams,
    dim: usize,
    box_length: f64,
    quad: Arc<Grid>,
    fft: BandFft,
    waves: Vec<Wave>,
    /// Perpendicular directions per wave (`dim - 1` each).
    dirs: Vec<Vec<Vec<f64>>>,
    /// Normalization `sqrt(2/|Q|)` of the oscillating basis functions.
    c_osc: f64,
    /// Normalization `1/sqrt|Q|` of the constant.
    c_mean: f64,
}

/// Coefficient vector of the Galerkin system.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients {
    /// Velocity coefficients, per wave: for each direction, cos then sin.
    pub a: Vec<f64>,
    /// Phase-field coefficients: the mean, then per wave cos and sin.
    pub b: Vec<f64>,
}

impl Coefficients {
    fn axpy(&self, s: f64, other: &Coefficients) -> Coefficients {
        Coefficients {
            a: self.a.iter().zip(&other.a).map(|(x, y)| x + s * y).collect(),
            b: self.b.iter().zip(&other.b).map(|(x, y)| x + s * y).collect(),
        }
    }

    fn is_finite(&self) -> bool {
        self.a.iter().chain(&self.b).all(|v| v.is_finite())
    }
}

/// Real-space fields and derived quantities of one evaluation.
struct Fields {
    phi: Vec<f64>,
    grad_phi: Vec<Vec<f64>>,
    u: Vec<Vec<f64>>,
    grad_u: Vec<Vec<Vec<f64>>>,
    /// Chemical potential coefficients, laid out like `b`.
    c: Vec<f64>,
    grad_psi: Vec<Vec<f64>>,
}

/// Sampled RK4 trajectory.
#[derive(Debug, Clone)]
pub struct OracleTrajectory {
    pub times: Vec<f64>,
    pub coeffs: Vec<Coefficients>,
    /// Accumulated `(1/M) int eta |Du|^2` and `int m |grad psi|^2` at each sample.
    pub dissipation: Vec<(f64, f64)>,
}

impl GalerkinSystem {
    /// Builds the system for `|j_i| <= n_modes` on the box described by `spec`
    /// (only its dimension and length are used).
    pub fn assemble(n_modes: usize, params: PhysParams, spec: &GridSpec) -> Result<Self> {
        if n_modes == 0 || n_modes > MAX_MODES {
            return Err(Error::Config(format!(
                "n_modes must lie in [1, {MAX_MODES}], got {n_modes}"
            )));
        }
        params.validate()?;
        let n_quad = (4 * n_modes + 1).next_power_of_two().max(8);
        let quad = Grid::new(GridSpec::new(spec.dim, n_quad, spec.box_length).with_dealias(1.0))?;
        let dim = spec.dim;
        let l = spec.box_length;
        let kk = n_modes as i64;

        let side = 2 * kk + 1;
        let mut js: Vec<Vec<i64>> = Vec::new();
        for flat in 0..side.pow(dim as u32) {
            let mut rem = flat;
            let mut j = vec![0i64; dim];
            for slot in j.iter_mut().rev() {
                *slot = rem % side - kk;
                rem /= side;
            }
            if j.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0) {
                js.push(j);
            }
        }
        js.sort_by(|x, y| {
            let nx: i64 = x.iter().map(|v| v * v).sum();
            let ny: i64 = y.iter().map(|v| v * v).sum();
            nx.cmp(&ny).then_with(|| x.cmp(y))
        });

        let waves: Vec<Wave> = js
            .iter()
            .map(|j| {
                let k: Vec<f64> = j.iter().map(|&x| 2.0 * std::f64::consts::PI * x as f64 / l).collect();
                let neg: Vec<i64> = j.iter().map(|x| -x).collect();
                Wave {
                    ksq: k.iter().map(|x| x * x).sum(),
                    k,
                    plus: quad.flat_index(j).expect("mode inside quadrature grid"),
                    minus: quad.flat_index(&neg).expect("mode inside quadrature grid"),
                    j: j.clone(),
                }
            })
            .collect();
        let dirs = waves.iter().map(|w| perpendicular_directions(&w.j)).collect();
        let vol = l.powi(dim as i32);
        Ok(GalerkinSystem {
            n_modes,
            params,
            dim,
            box_length: l,
            quad,
            fft: BandFft::new(dim, n_quad, n_modes),
            waves,
            dirs,
            c_osc: (2.0 / vol).sqrt(),
            c_mean: 1.0 / vol.sqrt(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn phi_len(&self) -> usize {
        1 + 2 * self.waves.len()
    }

    pub fn u_len(&self) -> usize {
        2 * self.waves.len() * (self.dim - 1)
    }

    /// Points per axis of the quadrature grid.
    pub fn quadrature_points(&self) -> usize {
        self.quad.n()
    }

    fn volume(&self) -> f64 {
        self.box_length.powi(self.dim as i32)
    }

    fn phi_pair(&self, b: &[f64], w: usize) -> Pair {
        Pair {
            alpha: b[1 + 2 * w],
            beta: b[2 + 2 * w],
        }
    }

    /// Velocity component `i` of wave `w`, as cos/sin coefficients.
    fn u_pair(&self, a: &[f64], w: usize, i: usize) -> Pair {
        let per = 2 * (self.dim - 1);
        let mut p = Pair::default();
        for (d, e) in self.dirs[w].iter().enumerate() {
            p.alpha += e[i] * a[per * w + 2 * d];
            p.beta += e[i] * a[per * w + 2 * d + 1];
        }
        p
    }

    /// Adds `factor * (mean / sqrt|Q| + sum_w pair_w . basis_w)` to an unnormalized
    /// spectrum.
    fn add_spectrum(&self, buf: &mut [Complex64], factor: Complex64, mean: f64, pairs: &[Pair]) {
        buf[0] += factor * (mean * self.c_mean);
        let h = 0.5 * self.c_osc;
        for (w, p) in self.waves.iter().zip(pairs) {
            let z = factor * Complex64::new(p.alpha, -p.beta) * h;
            let zc = factor * Complex64::new(p.alpha, p.beta) * h;
            buf[w.plus] += z;
            buf[w.minus] += zc;
        }
    }

    /// Real samples of several band-limited fields `(mean, pairs)`, two per complex
    /// transform.
    fn synthesize(&self, fields: &[(f64, Vec<Pair>)]) -> Vec<Vec<f64>> {
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let mut buf = vec![Complex64::default(); self.fft.len()];
        let mut out = Vec::with_capacity(fields.len());
        for chunk in fields.chunks(2) {
            buf.fill(Complex64::default());
            self.add_spectrum(&mut buf, one, chunk[0].0, &chunk[0].1);
            if let Some((mean, pairs)) = chunk.get(1) {
                self.add_spectrum(&mut buf, i, *mean, pairs);
            }
            self.fft.backward(&mut buf);
            out.push(buf.iter().map(|c| c.re).collect());
            if chunk.len() == 2 {
                out.push(buf.iter().map(|c| c.im).collect());
            }
        }
        out
    }

    /// Basis projections `(g, 1/sqrt|Q|)` and `(g, basis_w)` of real samples, two
    /// fields per complex transform.
    fn project(&self, fields: &[&[f64]]) -> Vec<(f64, Vec<Pair>)> {
        let mut out = Vec::with_capacity(fields.len());
        for chunk in fields.chunks(2) {
            let second = chunk.get(1).copied();
            let mut z: Vec<Complex64> = (0..self.quad.len())
                .map(|m| Complex64::new(chunk[0][m], second.map_or(0.0, |g| g[m])))
                .collect();
            self.fft.forward(&mut z);
            let split = |p: usize, q: usize| {
                let (zp, zq) = (z[p], z[q].conj());
                ((zp + zq) * 0.5, (zp - zq) * Complex64::new(0.0, -0.5))
            };
            let (g0, h0) = split(0, 0);
            let mut pg = Vec::with_capacity(self.waves.len());
            let mut ph = Vec::with_capacity(self.waves.len());
            for w in &self.waves {
                let (g, h) = split(w.plus, w.minus);
                pg.push(self.pair_from_dft(g));
                ph.push(self.pair_from_dft(h));
            }
            out.push((self.mean_from_dft(g0), pg));
            if second.is_some() {
                out.push((self.mean_from_dft(h0), ph));
            }
        }
        out
    }

    fn pair_from_dft(&self, g: Complex64) -> Pair {
        let s = self.c_osc * self.volume() / self.quad.len() as f64;
        Pair {
            alpha: s * g.re,
            beta: -s * g.im,
        }
    }

    fn mean_from_dft(&self, g: Complex64) -> f64 {
        self.c_mean * self.volume() / self.quad.len() as f64 * g.re
    }

    fn evaluate(&self, y: &Coefficients) -> Fields {
        let d = self.dim;
        let nw = self.waves.len();
        let pp: Vec<Pair> = (0..nw).map(|w| self.phi_pair(&y.b, w)).collect();
        let up: Vec<Vec<Pair>> = (0..d).map(|i| (0..nw).map(|w| self.u_pair(&y.a, w, i)).collect()).collect();

        let mut spectra = vec![(y.b[0], pp.clone())];
        for a in 0..d {
            let dp: Vec<Pair> = pp.iter().zip(&self.waves).map(|(p, w)| p.derivative(w.k[a])).collect();
            spectra.push((0.0, dp));
        }
        let flow = self.params.hydrodynamics;
        if flow {
            for comp in &up {
                spectra.push((0.0, comp.clone()));
            }
            for comp in &up {
                for a in 0..d {
                    let dp: Vec<Pair> = comp.iter().zip(&self.waves).map(|(p, w)| p.derivative(w.k[a])).collect();
                    spectra.push((0.0, dp));
                }
            }
        }
        let mut samples = self.synthesize(&spectra).into_iter();
        let phi = samples.next().unwrap();
        let grad_phi: Vec<Vec<f64>> = (0..d).map(|_| samples.next().unwrap()).collect();
        let (u, grad_u) = if flow {
            let u: Vec<Vec<f64>> = (0..d).map(|_| samples.next().unwrap()).collect();
            let g: Vec<Vec<Vec<f64>>> = (0..d)
                .map(|_| (0..d).map(|_| samples.next().unwrap()).collect())
                .collect();
            (u, g)
        } else {
            (Vec::new(), Vec::new())
        };

        // psi coefficients: gamma b + (f(phi), basis)
        let p = &self.params;
        let f: Vec<f64> = phi.iter().map(|&s| p.f(s)).collect();
        let (f0, fp) = self.project(&[&f]).pop().unwrap();
        let mut c = vec![0.0; self.phi_len()];
        c[0] = f0;
        for (w, wave) in self.waves.iter().enumerate() {
            let gamma = wave.ksq * wave.ksq - 2.0 * wave.ksq;
            c[1 + 2 * w] = gamma * pp[w].alpha + fp[w].alpha;
            c[2 + 2 * w] = gamma * pp[w].beta + fp[w].beta;
        }
        let cp: Vec<Pair> = (0..nw).map(|w| self.phi_pair(&c, w)).collect();
        let gs: Vec<(f64, Vec<Pair>)> = (0..d)
            .map(|a| (0.0, cp.iter().zip(&self.waves).map(|(p, w)| p.derivative(w.k[a])).collect()))
            .collect();
        let grad_psi = self.synthesize(&gs);
        Fields {
            phi,
            grad_phi,
            u,
            grad_u,
            c,
            grad_psi,
        }
    }

    /// Time derivative of the coefficients, plus the instantaneous viscous and mobility
    /// dissipation rates.
    fn rhs_with_rates(&self, y: &Coefficients) -> (Coefficients, f64, f64) {
        let d = self.dim;
        let p = &self.params;
        let fl = self.evaluate(y);
        let npts = self.quad.len();
        let dv = self.quad.cell_volume();
        let flow = p.hydrodynamics;

        // fluxes on the grid
        let th: Vec<f64> = fl.phi.iter().map(|s| s.tanh()).collect();
        let mob: Vec<f64> = th.iter().map(|&t| p.mobility.value_with_tanh(t)).collect();
        let mut grid_fields: Vec<Vec<f64>> = (0..d)
            .map(|a| (0..npts).map(|m| mob[m] * fl.grad_psi[a][m]).collect())
            .collect();
        let mut mob_rate = 0.0;
        for m in 0..npts {
            let g2: f64 = (0..d).map(|a| fl.grad_psi[a][m].powi(2)).sum();
            mob_rate += mob[m] * g2;
        }
        mob_rate *= dv;

        let mut visc_rate = 0.0;
        let mut pairs_ij = Vec::new();
        if flow {
            // u . grad phi
            grid_fields.push(
                (0..npts)
                    .map(|m| (0..d).map(|a| fl.u[a][m] * fl.grad_phi[a][m]).sum())
                    .collect(),
            );
            // eta D_il for i <= l
            let eta: Vec<f64> = th.iter().map(|&t| p.eta.value_with_tanh(t)).collect();
            for i in 0..d {
                for l in i..d {
                    pairs_ij.push((i, l));
                    grid_fields.push(
                        (0..npts)
                            .map(|m| eta[m] * 0.5 * (fl.grad_u[i][l][m] + fl.grad_u[l][i][m]))
                            .collect(),
                    );
                }
            }
            for m in 0..npts {
                let mut d2 = 0.0;
                for i in 0..d {
                    for l in 0..d {
                        d2 += (0.5 * (fl.grad_u[i][l][m] + fl.grad_u[l][i][m])).powi(2);
                    }
                }
                visc_rate += eta[m] * d2;
            }
            visc_rate *= dv / p.coupling;
            // (u . grad) u_i + M phi d_i psi
            for i in 0..d {
                grid_fields.push(
                    (0..npts)
                        .map(|m| {
                            let conv: f64 = (0..d).map(|a| fl.u[a][m] * fl.grad_u[i][a][m]).sum();
                            conv + p.coupling * fl.phi[m] * fl.grad_psi[i][m]
                        })
                        .collect(),
                );
            }
        }
        let refs: Vec<&[f64]> = grid_fields.iter().map(|v| v.as_slice()).collect();
        let proj = self.project(&refs);

        // phase field: b' = -(u.grad phi, rho) - (m grad psi, grad rho)
        let mut db = vec![0.0; self.phi_len()];
        for (w, wave) in self.waves.iter().enumerate() {
            let mut acc = Pair::default();
            for a in 0..d {
                // (F, d_a(alpha cos + beta sin)) uses the derivative pair with unit coefficients
                let fa = proj[a].1[w];
                acc.alpha -= -wave.k[a] * fa.beta;
                acc.beta -= wave.k[a] * fa.alpha;
            }
            if flow {
                let adv = proj[d].1[w];
                acc.alpha -= adv.alpha;
                acc.beta -= adv.beta;
            }
            db[1 + 2 * w] = acc.alpha;
            db[2 + 2 * w] = acc.beta;
        }
        if flow {
            db[0] = -proj[d].0;
        }

        // velocity: a' = -(eta Du, grad w) - ((u.grad)u + M phi grad psi, w)
        let mut da = vec![0.0; self.u_len()];
        if flow {
            let base_tau = d + 1;
            let base_g = base_tau + pairs_ij.len();
            let per = 2 * (d - 1);
            for (w, wave) in self.waves.iter().enumerate() {
                for (dir, e) in self.dirs[w].iter().enumerate() {
                    let mut ac = 0.0;
                    let mut as_ = 0.0;
                    // (tau_il, d_l (e_i cos)) = -e_i k_l (tau_il, sin)
                    // (tau_il, d_l (e_i sin)) =  e_i k_l (tau_il, cos)
                    for (q, &(i, l)) in pairs_ij.iter().enumerate() {
                        let t = proj[base_tau + q].1[w];
                        let mult = if i == l { 1.0 } else { 2.0 };
                        let sym = if i == l {
                            e[i] * wave.k[l]
                        } else {
                            0.5 * (e[i] * wave.k[l] + e[l] * wave.k[i])
                        };
                        ac -= -mult * sym * t.beta;
                        as_ -= mult * sym * t.alpha;
                    }
                    for i in 0..d {
                        let g = proj[base_g + i].1[w];
                        ac -= e[i] * g.alpha;
                        as_ -= e[i] * g.beta;
                    }
                    da[per * w + 2 * dir] = ac;
                    da[per * w + 2 * dir + 1] = as_;
                }
            }
        }
        (Coefficients { a: da, b: db }, visc_rate, mob_rate)
    }

    /// Right-hand side of the Galerkin ODE.
    pub fn rhs(&self, y: &Coefficients) -> Coefficients {
        self.rhs_with_rates(y).0
    }

    /// Chemical potential coefficients for `y`, laid out like `b`.
    pub fn psi_coefficients(&self, y: &Coefficients) -> Vec<f64> {
        self.evaluate(y).c
    }

    /// Orthogonal projection of a state onto the retained span.
    pub fn project_initial(&self, state: &State) -> Result<Coefficients> {
        let grid = state.grid();
        if grid.dim() != self.dim || (grid.spec().box_length - self.box_length).abs() > 0.0 {
            return Err(Error::GridMismatch(format!(
                "state lives on a {}D box of length {}, the system on a {}D box of length {}",
                grid.dim(),
                grid.spec().box_length,
                self.dim,
                self.box_length
            )));
        }
        if grid.n() / 2 <= self.n_modes {
            return Err(Error::GridMismatch(format!(
                "grid with n = {} cannot resolve {} modes",
                grid.n(),
                self.n_modes
            )));
        }
        let n_tot = grid.len() as f64;
        let vol = self.volume();
        let coeff_at = |c: &[Complex64], j: &[i64]| c[grid.flat_index(j).expect("resolved")];
        let pair = |c: &[Complex64], j: &[i64]| {
            let g = coeff_at(c, j);
            let s = self.c_osc * vol / n_tot;
            Pair {
                alpha: s * g.re,
                beta: -s * g.im,
            }
        };
        let pc = state.phi.coeffs();
        let mut b = vec![0.0; self.phi_len()];
        b[0] = self.c_mean * vol / n_tot * pc[0].re;
        for (w, wave) in self.waves.iter().enumerate() {
            let p = pair(pc, &wave.j);
            b[1 + 2 * w] = p.alpha;
            b[2 + 2 * w] = p.beta;
        }
        let mut a = vec![0.0; self.u_len()];
        let per = 2 * (self.dim - 1);
        for (w, wave) in self.waves.iter().enumerate() {
            let comps: Vec<Pair> = (0..self.dim).map(|i| pair(state.u.comp(i).coeffs(), &wave.j)).collect();
            for (dir, e) in self.dirs[w].iter().enumerate() {
                a[per * w + 2 * dir] = (0..self.dim).map(|i| e[i] * comps[i].alpha).sum();
                a[per * w + 2 * dir + 1] = (0..self.dim).map(|i| e[i] * comps[i].beta).sum();
            }
        }
        Ok(Coefficients { a, b })
    }

    /// Synthesizes the fields on `grid`, which must share the box and resolve the modes.
    pub fn to_state(&self, y: &Coefficients, grid: &Arc<Grid>, t: f64) -> Result<State> {
        if grid.dim() != self.dim
            || grid.spec().box_length != self.box_length
            || grid.n() / 2 <= self.n_modes
        {
            return Err(Error::GridMismatch(format!(
                "target grid {:?} cannot hold the {}-mode system",
                grid.spec(),
                self.n_modes
            )));
        }
        let n_tot = grid.len() as f64;
        let h = 0.5 * n_tot * self.c_osc;
        let fill = |mean: f64, pairs: &mut dyn Iterator<Item = Pair>| {
            let mut s = vec![Complex64::default(); grid.len()];
            s[0] = Complex64::new(mean * self.c_mean * n_tot, 0.0);
            for (wave, p) in self.waves.iter().zip(pairs) {
                let z = Complex64::new(p.alpha, -p.beta) * h;
                let neg: Vec<i64> = wave.j.iter().map(|x| -x).collect();
                s[grid.flat_index(&wave.j).expect("resolved")] += z;
                s[grid.flat_index(&neg).expect("resolved")] += z.conj();
            }
            s
        };
        let nw = self.waves.len();
        let phi = ScalarField::from_coeffs(grid, fill(y.b[0], &mut (0..nw).map(|w| self.phi_pair(&y.b, w))));
        let u = VectorField::from_coeffs(
            grid,
            (0..self.dim)
                .map(|i| fill(0.0, &mut (0..nw).map(|w| self.u_pair(&y.a, w, i))))
                .collect(),
        );
        State::new(u, phi, t)
    }

    /// Classical fourth-order Runge-Kutta from `y0` at `t = 0` to `t_end`, sampling
    /// every `sample_every` steps and at the end. Dissipation integrals are carried as
    /// extra components of the same integration.
    pub fn integrate_rk4(
        &self,
        y0: &Coefficients,
        dt: f64,
        t_end: f64,
        sample_every: usize,
    ) -> Result<OracleTrajectory> {
        if !(dt > 0.0 && dt.is_finite()) || !(t_end >= 0.0) {
            return Err(Error::Config(format!("invalid oracle dt = {dt} or t_end = {t_end}")));
        }
        let steps = if t_end == 0.0 { 0 } else { (t_end / dt - 1e-9).ceil() as usize };
        let sample_every = sample_every.max(1);
        let mut y = y0.clone();
        let (mut vi, mut mi) = (0.0, 0.0);
        let mut traj = OracleTrajectory {
            times: vec![0.0],
            coeffs: vec![y.clone()],
            dissipation: vec![(0.0, 0.0)],
        };
        for step in 1..=steps {
            let (k1, v1, m1) = self.rhs_with_rates(&y);
            let (k2, v2, m2) = self.rhs_with_rates(&y.axpy(0.5 * dt, &k1));
            let (k3, v3, m3) = self.rhs_with_rates(&y.axpy(0.5 * dt, &k2));
            let (k4, v4, m4) = self.rhs_with_rates(&y.axpy(dt, &k3));
            let w = dt / 6.0;
            y = y
                .axpy(w, &k1)
                .axpy(2.0 * w, &k2)
                .axpy(2.0 * w, &k3)
                .axpy(w, &k4);
            vi += w * (v1 + 2.0 * v2 + 2.0 * v3 + v4);
            mi += w * (m1 + 2.0 * m2 + 2.0 * m3 + m4);
            let t = step as f64 * dt;
            if !y.is_finite() {
                return Err(Error::BlowUp { step, t });
            }
            if step % sample_every == 0 || step == steps {
                traj.times.push(t);
                traj.coeffs.push(y.clone());
                traj.dissipation.push((vi, mi));
            }
        }
        Ok(traj)
    }

    /// Kinetic and Swift-Hohenberg energies of `y`, by orthonormality and exact quadrature.
    pub fn energies(&self, y: &Coefficients) -> (f64, f64) {
        let p = &self.params;
        let kinetic = y.a.iter().map(|v| v * v).sum::<f64>() / (2.0 * p.coupling);
        let mut quad = 0.0;
        for (w, wave) in self.waves.iter().enumerate() {
            let q = wave.ksq;
            let sq = y.b[1 + 2 * w].powi(2) + y.b[2 + 2 * w].powi(2);
            quad += (0.5 * q * q - q) * sq;
        }
        let nw = self.waves.len();
        let pp: Vec<Pair> = (0..nw).map(|w| self.phi_pair(&y.b, w)).collect();
        let phi = self.synthesize(&[(y.b[0], pp)]).pop().unwrap();
        let bulk: f64 = phi.iter().map(|&s| p.bulk.primitive(s, p.r)).sum::<f64>() * self.quad.cell_volume();
        (kinetic, quad + bulk)
    }

    /// `<phi>` from the mean coefficient.
    pub fn mass(&self, y: &Coefficients) -> f64 {
        y.b[0] * self.c_mean
    }

    /// Norm monitor from the coefficients.
    pub fn norms(&self, y: &Coefficients) -> NormMonitor {
        let c = self.psi_coefficients(y);
        let (mut h2, mut h3, mut psi1) = (y.b[0].powi(2), y.b[0].powi(2), c[0].powi(2));
        let (mut uh, mut uv) = (0.0, 0.0);
        let per = 2 * (self.dim - 1);
        for (w, wave) in self.waves.iter().enumerate() {
            let q = wave.ksq;
            let sb = y.b[1 + 2 * w].powi(2) + y.b[2 + 2 * w].powi(2);
            let sc = c[1 + 2 * w].powi(2) + c[2 + 2 * w].powi(2);
            h2 += sb * (1.0 + q + q * q);
            h3 += sb * (1.0 + q + q * q + q * q * q);
            psi1 += sc * (1.0 + q);
            let sa: f64 = y.a[per * w..per * (w + 1)].iter().map(|v| v * v).sum();
            uh += sa;
            uv += sa * q;
        }
        NormMonitor {
            phi_h2: h2.sqrt(),
            phi_h3: h3.sqrt(),
            u_h: uh.sqrt(),
            u_v: uv.sqrt(),
            psi_h1: psi1.sqrt(),
        }
    }

    /// Energy ledger of a trajectory.
    pub fn ledger(&self, traj: &OracleTrajectory, dt: f64) -> Vec<LedgerRow> {
        let mut e0 = None;
        traj.times
            .iter()
            .zip(&traj.coeffs)
            .zip(&traj.dissipation)
            .map(|((&t, y), &(visc, mob))| {
                let (kinetic, sh) = self.energies(y);
                let e0 = *e0.get_or_insert(kinetic + sh);
                LedgerRow {
                    step: (t / dt).round() as usize,
                    t,
                    kinetic,
                    sh,
                    visc_diss: visc,
                    mob_diss: mob,
                    residual: kinetic + sh + visc + mob - e0,
                    mass: self.mass(y),
                    norms: self.norms(y),
                }
            })
            .collect()
    }
}

//! Search over test channels P(xh1, w | x) for the smallest sum rate at a given
//! common rate. `w` is the second reconstruction, or in causal mode a strategy
//! mapping the crib symbol to the second reconstruction.
//!
//! A simplex grid (pruned by the distortion budgets) supplies starting points,
//! which are then polished with COBYLA.

use cobyla::{minimize, Func, RhoBeg, StopTols};
use serde::{Deserialize, Serialize};

use super::{CribbingMode, CribbingVariant, Frontier, FrontierPoint, Provenance, Rate, Setting};
use crate::error::{Error, Result};
use crate::prob::names::{AUX, RECON1, RECON2, SOURCE};
use crate::prob::{CribFunction, DistortionSpec, JointPmf, Variable};

const FEAS_TOL: f64 = 1e-9;
const TIE_TOL: f64 = 1e-12;
const MAX_EVALS: usize = 4000;

/// Description of the searched family of joint distributions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeasibleParameterization {
    pub recon1_size: usize,
    pub recon2_size: usize,
    /// Upper limit on the auxiliary alphabet in causal mode.
    pub aux_cap: usize,
    pub grid_step: f64,
    pub refine_tol: f64,
    pub r0_points: usize,
    /// Local refinements per common-rate value.
    pub starts: usize,
    pub max_grid_cells: usize,
}

impl Default for FeasibleParameterization {
    fn default() -> Self {
        Self {
            recon1_size: 2,
            recon2_size: 2,
            aux_cap: 6,
            grid_step: 1.0 / 64.0,
            refine_tol: 1e-6,
            r0_points: 129,
            starts: 6,
            max_grid_cells: 4_000_000,
        }
    }
}

/// An optimizing joint distribution and its rates.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchPoint {
    /// Common-rate bound of the joint, before clipping.
    pub r0_raw: f64,
    pub sum_rate: f64,
    pub d1: f64,
    pub d2: f64,
    /// Test channel, one slice of `cells` entries per source symbol with positive mass.
    pub params: Vec<f64>,
}

#[derive(Clone, Copy, Debug)]
struct Eval {
    sum: f64,
    r0: f64,
    d1: f64,
    d2: f64,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    NonCausal,
    Sequential,
    NoCribbing,
}

/// Precomputed search problem for one setting and distortion pair.
pub struct FrontierSearch {
    setting: Setting,
    spec: DistortionSpec<f64>,
    param: FeasibleParameterization,
    kind: Kind,
    px: Vec<f64>,
    active: Vec<usize>,
    n1: usize,
    nw: usize,
    nz: usize,
    crib: Vec<usize>,
    /// Second reconstruction for each (w, xh1) pair.
    recon2: Vec<usize>,
    recon2_size: usize,
    strategies: Option<Vec<Vec<usize>>>,
    h_x: f64,
    grid: Vec<(Vec<f64>, Eval)>,
}

fn h_sum(v: &[f64]) -> f64 {
    v.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

/// All compositions of `total` into `parts` nonnegative integers.
fn compositions(total: usize, parts: usize, out: &mut Vec<Vec<usize>>, cur: &mut Vec<usize>, limit: usize) -> bool {
    if cur.len() + 1 == parts {
        cur.push(total);
        out.push(cur.clone());
        cur.pop();
        return out.len() <= limit;
    }
    for v in 0..=total {
        cur.push(v);
        let ok = compositions(total - v, parts, out, cur, limit);
        cur.pop();
        if !ok {
            return false;
        }
    }
    true
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl FrontierSearch {
    pub fn new(
        source: &JointPmf<f64>,
        spec: &DistortionSpec<f64>,
        setting: &Setting,
        param: &FeasibleParameterization,
    ) -> Result<Self> {
        if source.vars().len() != 1 {
            return Err(Error::Usage("source pmf must be over a single variable".into()));
        }
        if !(param.grid_step > 0.0 && param.grid_step <= 0.25) {
            return Err(Error::Config(format!("grid step {} outside (0, 0.25]", param.grid_step)));
        }
        if param.recon1_size == 0 || param.recon2_size == 0 {
            return Err(Error::Config("reconstruction alphabets must be nonempty".into()));
        }
        let px = source.probs().to_vec();
        let nx = px.len();
        if spec.d1.source_size() != nx || spec.d1.recon_size() != param.recon1_size {
            return Err(Error::Config("first distortion matrix does not match the alphabets".into()));
        }
        if spec.d2.source_size() != nx || spec.d2.recon_size() != param.recon2_size {
            return Err(Error::Config("second distortion matrix does not match the alphabets".into()));
        }
        let n1 = param.recon1_size;
        let n2 = param.recon2_size;
        let (kind, g) = match setting {
            Setting::NoCribbing => (Kind::NoCribbing, CribFunction::identity(n1)),
            Setting::Cribbing { mode, variant } => {
                let g = variant.function(n1);
                if g.domain_size() != n1 {
                    return Err(Error::Config(format!(
                        "crib function has domain {} but the first reconstruction has {n1} symbols",
                        g.domain_size()
                    )));
                }
                let kind = if *mode == CribbingMode::NonCausal { Kind::NonCausal } else { Kind::Sequential };
                (kind, g)
            }
        };
        let nz = g.image_size();
        let crib: Vec<usize> = (0..n1).map(|a| g.apply(a)).collect();
        let causal = matches!(setting, Setting::Cribbing { mode: CribbingMode::Causal, .. });
        let (nw, recon2, strategies) = if causal {
            let count = n2.checked_pow(nz as u32).unwrap_or(usize::MAX);
            let bound = (nx * n1 + 4).min(param.aux_cap);
            if count > bound {
                return Err(Error::Config(format!(
                    "causal search needs {count} auxiliary symbols (one per map from crib to second \
                     reconstruction) but the cap is {bound}"
                )));
            }
            let strategies: Vec<Vec<usize>> = (0..count)
                .map(|t| (0..nz).map(|z| (t / n2.pow(z as u32)) % n2).collect())
                .collect();
            let recon2 = (0..count)
                .flat_map(|t| crib.iter().map(|&z| strategies[t][z]).collect::<Vec<_>>())
                .collect();
            (count, recon2, Some(strategies))
        } else {
            let recon2 = (0..n2).flat_map(|w| std::iter::repeat_n(w, n1)).collect();
            (n2, recon2, None)
        };
        let active: Vec<usize> = (0..nx).filter(|&x| px[x] > 0.0).collect();
        let h_x = h_sum(&px);
        let mut s = Self {
            setting: setting.clone(),
            spec: spec.clone(),
            param: param.clone(),
            kind,
            px,
            active,
            n1,
            nw,
            nz,
            crib,
            recon2,
            recon2_size: n2,
            strategies,
            h_x,
            grid: Vec::new(),
        };
        s.build_grid()?;
        Ok(s)
    }

    fn cells(&self) -> usize {
        self.n1 * self.nw
    }

    /// Second reconstruction of cell (xh1, w).
    fn x2_of(&self, a: usize, w: usize) -> usize {
        self.recon2[w * self.n1 + a]
    }

    fn evaluate(&self, params: &[f64]) -> Eval {
        let k = self.cells();
        let (n1, nw, nz) = (self.n1, self.nw, self.nz);
        let mut m_aw = vec![0.0; k];
        let mut m_zw = vec![0.0; nz * nw];
        let mut m_w = vec![0.0; nw];
        let mut m_z = vec![0.0; nz];
        let mut h_full = 0.0;
        let mut h_xzw = 0.0;
        let mut h_xw = 0.0;
        let (mut d1, mut d2) = (0.0, 0.0);
        let mut xzw = vec![0.0; nz * nw];
        let mut xw = vec![0.0; nw];
        for (s, &x) in self.active.iter().enumerate() {
            let slice = &params[s * k..(s + 1) * k];
            xzw.iter_mut().for_each(|v| *v = 0.0);
            xw.iter_mut().for_each(|v| *v = 0.0);
            for a in 0..n1 {
                let z = self.crib[a];
                for w in 0..nw {
                    let q = self.px[x] * slice[a * nw + w];
                    if q <= 0.0 {
                        continue;
                    }
                    h_full -= q * q.log2();
                    m_aw[a * nw + w] += q;
                    xzw[z * nw + w] += q;
                    xw[w] += q;
                    d1 += q * self.spec.d1.at(x, a);
                    d2 += q * self.spec.d2.at(x, self.x2_of(a, w));
                }
            }
            h_xzw += h_sum(&xzw);
            h_xw += h_sum(&xw);
            for (i, v) in xzw.iter().enumerate() {
                m_zw[i] += v;
            }
            for (i, v) in xw.iter().enumerate() {
                m_w[i] += v;
            }
        }
        for z in 0..nz {
            m_z[z] = (0..nw).map(|w| m_zw[z * nw + w]).sum();
        }
        let sum = self.h_x + h_sum(&m_aw) - h_full;
        let r0 = match self.kind {
            Kind::NoCribbing => self.h_x + h_sum(&m_w) - h_xw,
            Kind::NonCausal => self.h_x + h_sum(&m_zw) - h_xzw - h_sum(&m_z),
            Kind::Sequential => self.h_x - h_xzw + h_sum(&m_w),
        };
        Eval { sum, r0, d1, d2 }
    }

    fn build_grid(&mut self) -> Result<()> {
        let m = (1.0 / self.param.grid_step).round().max(1.0) as usize;
        let step = 1.0 / m as f64;
        // In causal mode the grid covers strategies that ignore the crib, which
        // is the strictly causal family; refinement then explores the rest.
        let (grid_w, embed): (usize, Vec<usize>) = match &self.strategies {
            Some(st) => {
                let consts = (0..self.recon2_size)
                    .map(|v| st.iter().position(|t| t.iter().all(|&y| y == v)).unwrap())
                    .collect();
                (self.recon2_size, consts)
            }
            None => (self.nw, (0..self.nw).collect()),
        };
        let kg = self.n1 * grid_w;
        let limit = self.param.max_grid_cells;
        if binomial(m + kg - 1, kg - 1) > 50.0 * limit as f64 {
            return Err(Error::Config(format!(
                "grid step {} is too fine for {kg} cells per source symbol",
                self.param.grid_step
            )));
        }
        let mut comps = Vec::new();
        if !compositions(m, kg, &mut comps, &mut Vec::new(), 50 * limit) {
            return Err(Error::Config("grid too large; increase the grid step".into()));
        }
        // Per-symbol distortion contributions, used for pruning.
        let mut slices: Vec<Vec<(Vec<f64>, f64, f64)>> = Vec::new();
        for &x in &self.active {
            let mut list = Vec::new();
            for c in &comps {
                let mut full = vec![0.0; self.cells()];
                let (mut e1, mut e2) = (0.0, 0.0);
                for a in 0..self.n1 {
                    for v in 0..grid_w {
                        let p = c[a * grid_w + v] as f64 * step;
                        let w = embed[v];
                        full[a * self.nw + w] = p;
                        e1 += self.px[x] * p * self.spec.d1.at(x, a);
                        e2 += self.px[x] * p * self.spec.d2.at(x, self.x2_of(a, w));
                    }
                }
                if e1 <= self.spec.budget1 + FEAS_TOL && e2 <= self.spec.budget2 + FEAS_TOL {
                    list.push((full, e1, e2));
                }
            }
            slices.push(list);
        }
        let mut grid = Vec::new();
        let mut params = Vec::new();
        self.product(&slices, 0, 0.0, 0.0, &mut params, &mut grid, limit)?;
        self.grid = grid;
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn product(
        &self,
        slices: &[Vec<(Vec<f64>, f64, f64)>],
        depth: usize,
        e1: f64,
        e2: f64,
        params: &mut Vec<f64>,
        out: &mut Vec<(Vec<f64>, Eval)>,
        limit: usize,
    ) -> Result<()> {
        if depth == slices.len() {
            if out.len() >= limit {
                return Err(Error::Config(format!("more than {limit} feasible grid cells; increase the grid step")));
            }
            let e = self.evaluate(params);
            out.push((params.clone(), e));
            return Ok(());
        }
        for (full, a, b) in &slices[depth] {
            let (n1, n2) = (e1 + a, e2 + b);
            if n1 > self.spec.budget1 + FEAS_TOL || n2 > self.spec.budget2 + FEAS_TOL {
                continue;
            }
            let len = params.len();
            params.extend_from_slice(full);
            self.product(slices, depth + 1, n1, n2, params, out, limit)?;
            params.truncate(len);
        }
        Ok(())
    }

    pub fn grid_cells(&self) -> usize {
        self.grid.len()
    }

    pub fn aux_size(&self) -> Option<usize> {
        self.strategies.as_ref().map(Vec::len)
    }

    fn feasible(&self, e: &Eval, r0: Option<f64>) -> bool {
        e.d1 <= self.spec.budget1 + FEAS_TOL
            && e.d2 <= self.spec.budget2 + FEAS_TOL
            && r0.is_none_or(|r| e.r0 <= r + FEAS_TOL)
    }

    /// Maps free coordinates back to full slices (last entry of each slice implied).
    fn expand(&self, free: &[f64]) -> Vec<f64> {
        let k = self.cells();
        let mut out = Vec::with_capacity(self.active.len() * k);
        for chunk in free.chunks(k - 1) {
            let s: f64 = chunk.iter().sum();
            out.extend_from_slice(chunk);
            out.push(1.0 - s);
        }
        out
    }

    fn compress(&self, params: &[f64]) -> Vec<f64> {
        let k = self.cells();
        params.chunks(k).flat_map(|c| c[..k - 1].to_vec()).collect()
    }

    /// Clamps tiny negatives and renormalizes each slice.
    fn project(&self, params: &mut [f64]) {
        for chunk in params.chunks_mut(self.cells()) {
            chunk.iter_mut().for_each(|v| *v = v.max(0.0));
            let s: f64 = chunk.iter().sum();
            chunk.iter_mut().for_each(|v| *v /= s);
        }
    }

    fn better(a: &SearchPoint, b: &SearchPoint, objective: impl Fn(&SearchPoint) -> f64) -> bool {
        let (fa, fb) = (objective(a), objective(b));
        if fa < fb - TIE_TOL {
            return true;
        }
        if fa > fb + TIE_TOL {
            return false;
        }
        a.params.partial_cmp(&b.params) == Some(std::cmp::Ordering::Less)
    }

    fn point(&self, params: Vec<f64>, e: Eval) -> SearchPoint {
        SearchPoint { r0_raw: e.r0, sum_rate: e.sum, d1: e.d1, d2: e.d2, params }
    }

    /// Local refinement from `start`. `minimize_r0` switches the objective to the
    /// common-rate bound; otherwise the sum rate is minimized subject to `r0`.
    fn refine(&self, start: &[f64], r0: Option<f64>, minimize_r0: bool) -> Option<SearchPoint> {
        let k = self.cells();
        let x0 = self.compress(start);
        let dim = x0.len();
        if dim == 0 {
            let e = self.evaluate(start);
            return self.feasible(&e, r0).then(|| self.point(start.to_vec(), e));
        }
        let objective = |x: &[f64], _: &mut ()| {
            let e = self.evaluate(&self.expand(x));
            if minimize_r0 { e.r0 } else { e.sum }
        };
        let c_d1 = |x: &[f64], _: &mut ()| self.spec.budget1 - self.evaluate(&self.expand(x)).d1;
        let c_d2 = |x: &[f64], _: &mut ()| self.spec.budget2 - self.evaluate(&self.expand(x)).d2;
        let c_r0 = |x: &[f64], _: &mut ()| r0.unwrap_or(0.0) - self.evaluate(&self.expand(x)).r0;
        let slice_cons: Vec<_> = (0..self.active.len())
            .map(|s| move |x: &[f64], _: &mut ()| 1.0 - x[s * (k - 1)..(s + 1) * (k - 1)].iter().sum::<f64>())
            .collect();
        let mut cons: Vec<&dyn Func<()>> = vec![&c_d1, &c_d2];
        if r0.is_some() && !minimize_r0 {
            cons.push(&c_r0);
        }
        for c in &slice_cons {
            cons.push(c);
        }
        let tols = StopTols {
            ftol_abs: 1e-13,
            xtol_abs: vec![self.param.refine_tol; dim],
            ..StopTols::default()
        };
        let bounds = vec![(0.0, 1.0); dim];
        let result = minimize(
            objective,
            &x0,
            &bounds,
            &cons,
            (),
            MAX_EVALS,
            RhoBeg::All(self.param.grid_step.min(0.125)),
            Some(tols),
        );
        let x = match result {
            Ok((_, x, _)) | Err((_, x, _)) => x,
        };
        let mut params = self.expand(&x);
        if params.iter().any(|v| !v.is_finite() || *v < -1e-6) {
            return None;
        }
        self.project(&mut params);
        let e = self.evaluate(&params);
        let r0_limit = if minimize_r0 { None } else { r0 };
        self.feasible(&e, r0_limit).then(|| self.point(params, e))
    }

    /// Smallest sum rate among joints whose common-rate bound is at most `r0`
    /// (no restriction when `None`). `None` when nothing feasible was found.
    pub fn min_sum_rate(&self, r0: Option<f64>) -> Option<SearchPoint> {
        let mut feas: Vec<usize> = Vec::new();
        let mut infeas: Vec<usize> = Vec::new();
        for (i, (_, e)) in self.grid.iter().enumerate() {
            if self.feasible(e, r0) {
                feas.push(i);
            } else {
                infeas.push(i);
            }
        }
        let key = |i: &usize| self.grid[*i].1.sum;
        feas.sort_by(|a, b| key(a).total_cmp(&key(b)).then(a.cmp(b)));
        let viol = |i: &usize| self.grid[*i].1.r0 - r0.unwrap_or(f64::INFINITY);
        infeas.sort_by(|a, b| viol(a).total_cmp(&viol(b)).then(key(a).total_cmp(&key(b))).then(a.cmp(b)));
        let half = self.param.starts.div_ceil(2);
        let starts: Vec<usize> = if feas.len() >= half {
            let rest = self.param.starts - half;
            feas.iter().take(half).chain(infeas.iter().take(rest)).copied().collect()
        } else {
            feas.iter().chain(infeas.iter()).take(self.param.starts).copied().collect()
        };
        let mut best: Option<SearchPoint> = feas.first().map(|&i| self.point(self.grid[i].0.clone(), self.grid[i].1));
        for i in starts {
            if let Some(p) = self.refine(&self.grid[i].0, r0, false) {
                if best.as_ref().is_none_or(|b| Self::better(&p, b, |s| s.sum_rate)) {
                    best = Some(p);
                }
            }
        }
        best
    }

    /// Joint with the smallest common-rate bound, before clipping.
    pub fn min_r0(&self) -> Option<SearchPoint> {
        let mut order: Vec<usize> = (0..self.grid.len()).collect();
        order.sort_by(|a, b| self.grid[*a].1.r0.total_cmp(&self.grid[*b].1.r0).then(a.cmp(b)));
        let mut best: Option<SearchPoint> = order.first().map(|&i| self.point(self.grid[i].0.clone(), self.grid[i].1));
        for &i in order.iter().take(self.param.starts) {
            if let Some(p) = self.refine(&self.grid[i].0, None, true) {
                if best.as_ref().is_none_or(|b| Self::better(&p, b, |s| s.r0_raw)) {
                    best = Some(p);
                }
            }
        }
        best
    }

    /// The joint distribution described by a parameter vector.
    pub fn joint(&self, params: &[f64]) -> Result<JointPmf<f64>> {
        let k = self.cells();
        let nx = self.px.len();
        let mut full = vec![0.0; nx * k];
        for (s, &x) in self.active.iter().enumerate() {
            full[x * k..(x + 1) * k].copy_from_slice(&params[s * k..(s + 1) * k]);
        }
        let x = JointPmf::single(SOURCE, self.px.clone())?;
        match &self.strategies {
            None => {
                // cells are (xh1, xh2) with xh2 fastest
                let p = x.with_conditional(Variable::new(RECON1, self.n1), &self.marg_a(&full))?;
                let cond2: Vec<f64> = (0..nx)
                    .flat_map(|xi| {
                        let full = &full;
                        (0..self.n1).flat_map(move |a| {
                            let row = &full[xi * k + a * self.nw..xi * k + (a + 1) * self.nw];
                            let s: f64 = row.iter().sum();
                            row.iter().map(move |v| if s > 0.0 { v / s } else { 1.0 / row.len() as f64 })
                        })
                    })
                    .collect();
                p.with_conditional(Variable::new(RECON2, self.nw), &cond2)
            }
            Some(_) => {
                let p = x.with_conditional(Variable::new(RECON1, self.n1), &self.marg_a(&full))?;
                let cond_u: Vec<f64> = (0..nx)
                    .flat_map(|xi| {
                        let full = &full;
                        (0..self.n1).flat_map(move |a| {
                            let row = &full[xi * k + a * self.nw..xi * k + (a + 1) * self.nw];
                            let s: f64 = row.iter().sum();
                            row.iter().map(move |v| if s > 0.0 { v / s } else { 1.0 / row.len() as f64 })
                        })
                    })
                    .collect();
                let p = p.with_conditional(Variable::new(AUX, self.nw), &cond_u)?;
                let n2 = self.recon2_size;
                let cond2: Vec<f64> = (0..nx)
                    .flat_map(|_| {
                        (0..self.n1).flat_map(move |a| {
                            (0..self.nw).flat_map(move |w| {
                                let y = self.x2_of(a, w);
                                (0..n2).map(move |v| if v == y { 1.0 } else { 0.0 })
                            })
                        })
                    })
                    .collect();
                p.with_conditional(Variable::new(RECON2, n2), &cond2)
            }
        }
    }

    fn marg_a(&self, full: &[f64]) -> Vec<f64> {
        let k = self.cells();
        let nx = self.px.len();
        let mut out = Vec::with_capacity(nx * self.n1);
        for x in 0..nx {
            let slice = &full[x * k..(x + 1) * k];
            if slice.iter().sum::<f64>() <= 0.0 {
                out.extend(std::iter::repeat_n(1.0 / self.n1 as f64, self.n1));
                continue;
            }
            for a in 0..self.n1 {
                out.push(slice[a * self.nw..(a + 1) * self.nw].iter().sum());
            }
        }
        out
    }

    /// Optimal tradeoff curve on the configured common-rate grid.
    pub fn frontier(&self) -> Frontier {
        let provenance = Provenance {
            method: "simplex grid + COBYLA".into(),
            grid_step: self.param.grid_step,
            grid_cells: self.grid.len(),
            refine_tol: self.param.refine_tol,
            starts_per_point: self.param.starts,
            aux_size: self.aux_size(),
        };
        let mut f = Frontier {
            setting: self.setting.clone(),
            d1: self.spec.budget1,
            d2: self.spec.budget2,
            points: Vec::new(),
            r0_min: None,
            sum_rate_min: None,
            provenance,
        };
        let free = match self.min_sum_rate(None) {
            Some(p) => p,
            None => return f,
        };
        let lowest = self.min_r0().expect("grid is nonempty");
        let r0_min = lowest.r0_raw.max(0.0);
        let mut first = lowest.sum_rate;
        if let Some(p) = self.min_sum_rate(Some(r0_min)) {
            first = first.min(p.sum_rate);
        }
        let n = self.param.r0_points.max(2);
        let mut r0s = vec![r0_min];
        r0s.extend((0..n).map(|k| free.sum_rate * k as f64 / (n - 1) as f64).filter(|&r| r > r0_min));
        let mut best = f64::INFINITY;
        for (i, &r0) in r0s.iter().enumerate() {
            let s = if i == 0 {
                Some(first)
            } else if free.r0_raw <= r0 {
                Some(free.sum_rate)
            } else {
                self.min_sum_rate(Some(r0)).map(|p| p.sum_rate)
            };
            if let Some(s) = s {
                // Feasible sets grow with R0, so the minimum sum rate cannot increase.
                best = best.min(s);
                f.points.push(FrontierPoint { r0, r1_min: (best - r0).max(0.0) });
            }
        }
        f.r0_min = Some(r0_min);
        f.sum_rate_min = Some(free.sum_rate);
        f
    }
}

/// Optimal tradeoff curve for one setting.
pub fn frontier(
    source: &JointPmf<f64>,
    spec: &DistortionSpec<f64>,
    setting: &Setting,
    param: &FeasibleParameterization,
) -> Result<Frontier> {
    Ok(FrontierSearch::new(source, spec, setting, param)?.frontier())
}

/// Smallest private rate when no common rate is available.
pub fn r0_zero_min_rate(
    source: &JointPmf<f64>,
    spec: &DistortionSpec<f64>,
    mode: CribbingMode,
    g: &CribFunction,
    param: &FeasibleParameterization,
) -> Result<Rate<f64>> {
    let setting = Setting::Cribbing { mode, variant: CribbingVariant::DetFn(g.clone()) };
    let s = FrontierSearch::new(source, spec, &setting, param)?;
    Ok(match s.min_sum_rate(Some(0.0)) {
        Some(p) => Rate::Finite(p.sum_rate),
        None => Rate::Infinite,
    })
}

//! Helpers shared by integration suites: random instances and a brute-force
//! feasibility oracle for projected inequality systems.
#![allow(dead_code)]

use crib_core::mac::{fm_eliminate, CausalStructure, Inequality, IneqSystem, MacInstance};
use crib_core::prob::mac_names::{AUX, CRIB, INPUT1, INPUT2, OUTPUT};
use crib_core::prob::names::{AUX as SR_AUX, CRIB as SR_CRIB, RECON1, RECON2, SOURCE};
use crib_core::prob::{CribFunction, JointPmf, Variable};
use crib_core::prob::DistortionSpec;
use crib_core::region::{sr_region, BernoulliFamily, CribbingMode, CribbingVariant, RegionSpec};
use crib_core::sim::SimConfig;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::Rng;

pub const BOX: f64 = 1e4;

pub fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// A system over 3 or 4 variables with small integer data.
pub fn random_system<R: Rng>(rng: &mut R) -> IneqSystem<BigRational> {
    let k = rng.random_range(3..=4);
    let m = rng.random_range(3..=7);
    let vars = (0..k).map(|i| format!("v{i}")).collect();
    let rows = (0..m)
        .map(|i| {
            let coeffs = (0..k).map(|_| q(rng.random_range(-3..=3))).collect();
            Inequality::new(coeffs, q(rng.random_range(-2..=6)), format!("r{i}"))
        })
        .collect();
    IneqSystem::new(vars, rows).unwrap()
}

fn solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let k = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(r, &v)| r.iter().copied().chain([v]).collect()).collect();
    for c in 0..k {
        let p = (c..k).max_by(|&x, &y| m[x][c].abs().total_cmp(&m[y][c].abs()))?;
        if m[p][c].abs() < 1e-12 {
            return None;
        }
        m.swap(c, p);
        for r in 0..k {
            if r != c {
                let f = m[r][c] / m[c][c];
                for j in c..=k {
                    m[r][j] -= f * m[c][j];
                }
            }
        }
    }
    Some((0..k).map(|i| m[i][k] / m[i][i]).collect())
}

/// True when some y in [-BOX, BOX]^e satisfies `a y <= b`, by vertex enumeration.
pub fn exists(a: &[Vec<f64>], b: &[f64]) -> bool {
    let e = a.first().map_or(0, |r| r.len());
    let mut rows: Vec<Vec<f64>> = a.to_vec();
    let mut rhs: Vec<f64> = b.to_vec();
    for j in 0..e {
        let mut r = vec![0.0; e];
        r[j] = 1.0;
        rows.push(r.clone());
        rhs.push(BOX);
        r[j] = -1.0;
        rows.push(r);
        rhs.push(BOX);
    }
    if e == 0 {
        return rhs.iter().all(|&v| v >= -1e-9);
    }
    let n = rows.len();
    let mut pick: Vec<usize> = (0..e).collect();
    loop {
        let sa: Vec<Vec<f64>> = pick.iter().map(|&i| rows[i].clone()).collect();
        let sb: Vec<f64> = pick.iter().map(|&i| rhs[i]).collect();
        if let Some(y) = solve(&sa, &sb) {
            let ok = rows
                .iter()
                .zip(&rhs)
                .all(|(r, &v)| r.iter().zip(&y).map(|(c, x)| c * x).sum::<f64>() <= v + 1e-9 * (1.0 + v.abs()));
            if ok {
                return true;
            }
        }
        let mut i = e;
        loop {
            if i == 0 {
                return false;
            }
            i -= 1;
            if pick[i] < n - e + i {
                pick[i] += 1;
                for j in i + 1..e {
                    pick[j] = pick[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Compares the projection of `sys` with the brute-force existence check at every
/// point of the grid `{0, step, .., hi}^k` over the remaining variables.
/// Returns the number of grid points checked.
pub fn check_projection(sys: &IneqSystem<f64>, eliminate: &[&str], step: f64, hi: f64) -> Result<usize, String> {
    let proj = fm_eliminate(sys, eliminate, None).map_err(|e| e.to_string())?;
    let keep: Vec<usize> = (0..sys.vars.len()).filter(|&i| !eliminate.contains(&sys.vars[i].as_str())).collect();
    let elim: Vec<usize> = eliminate.iter().map(|n| sys.vars.iter().position(|v| v == n).unwrap()).collect();
    let per_axis = (hi / step).round() as usize + 1;
    let k = keep.len();
    let total = per_axis.pow(k as u32);
    for flat in 0..total {
        let mut rem = flat;
        let x: Vec<f64> = (0..k)
            .map(|_| {
                let i = rem % per_axis;
                rem /= per_axis;
                i as f64 * step
            })
            .collect();
        let a: Vec<Vec<f64>> = sys.rows.iter().map(|r| elim.iter().map(|&j| r.coeffs[j]).collect()).collect();
        let b: Vec<f64> = sys
            .rows
            .iter()
            .map(|r| r.rhs - keep.iter().zip(&x).map(|(&j, v)| r.coeffs[j] * v).sum::<f64>())
            .collect();
        let oracle = exists(&a, &b);
        let projected = proj.system.holds(&x);
        if oracle != projected {
            return Err(format!("at {x:?}: oracle {oracle}, projection {projected}\n{:?}", proj.system.render()));
        }
    }
    Ok(total)
}

pub fn to_f64(sys: &IneqSystem<BigRational>) -> IneqSystem<f64> {
    IneqSystem {
        vars: sys.vars.clone(),
        rows: sys
            .rows
            .iter()
            .map(|r| {
                Inequality::new(r.coeffs.iter().map(|c| c.to_f64().unwrap()).collect(), r.rhs.to_f64().unwrap(), &r.label)
            })
            .collect(),
    }
}

fn random_channel<R: Rng>(rng: &mut R, inputs: usize, ny: usize) -> Vec<f64> {
    (0..inputs)
        .flat_map(|_| {
            JointPmf::<f64>::random(vec![Variable::new("Y", ny)], rng).unwrap().probs().to_vec()
        })
        .collect()
}

/// Random crib map onto at most `image` values from an alphabet of size `n`.
pub fn random_crib<R: Rng>(rng: &mut R, n: usize, image: usize) -> CribFunction {
    loop {
        let map: Vec<usize> = (0..n).map(|_| rng.random_range(0..image)).collect();
        let mut seen: Vec<usize> = map.clone();
        seen.sort();
        seen.dedup();
        // relabel onto 0..k
        let map = map.iter().map(|v| seen.iter().position(|s| s == v).unwrap()).collect();
        if let Ok(g) = CribFunction::new(map) {
            return g;
        }
    }
}

/// A random MAC instance: |X1| = 3, |X2| = 2, |Y| = 3; in causal mode P(u|x1) and
/// f(u, z1) are random and P(x1, x2) is the induced one.
pub fn random_mac<R: Rng>(rng: &mut R, mode: CribbingMode) -> MacInstance<f64> {
    let (n1, n2, ny) = (3, 2, 3);
    let g = random_crib(rng, n1, 2);
    let channel = random_channel(rng, n1 * n2, ny);
    if mode != CribbingMode::Causal {
        let input = JointPmf::random(vec![Variable::new(INPUT1, n1), Variable::new(INPUT2, n2)], rng).unwrap();
        return MacInstance::new(channel, ny, input, g, None).unwrap();
    }
    let nz = g.image_size();
    let nu = 4;
    let px1 = JointPmf::<f64>::random(vec![Variable::new(INPUT1, n1)], rng).unwrap();
    let aux_given_x1: Vec<f64> = (0..n1)
        .flat_map(|_| JointPmf::<f64>::random(vec![Variable::new(AUX, nu)], rng).unwrap().probs().to_vec())
        .collect();
    let f: Vec<usize> = (0..nu * nz).map(|_| rng.random_range(0..n2)).collect();
    let mut pin = vec![0.0; n1 * n2];
    for a in 0..n1 {
        for u in 0..nu {
            pin[a * n2 + f[u * nz + g.apply(a)]] += px1.probs()[a] * aux_given_x1[a * nu + u];
        }
    }
    let input = JointPmf::new(vec![Variable::new(INPUT1, n1), Variable::new(INPUT2, n2)], pin).unwrap();
    MacInstance::new(channel, ny, input, g, Some(CausalStructure { aux_size: nu, aux_given_x1, f })).unwrap()
}

/// The source coding joint matched to `m` by renaming.
pub fn matched_sr_joint(m: &MacInstance<f64>) -> JointPmf<f64> {
    let j = m.joint().unwrap();
    let mut map = vec![(INPUT1, RECON1), (INPUT2, RECON2), (OUTPUT, SOURCE), (CRIB, SR_CRIB)];
    if j.has_var(AUX) {
        map.push((AUX, SR_AUX));
    }
    j.rename(&map).unwrap()
}

/// Optimum test channel of the binary example at (0.05, 0.1).
pub fn bernoulli_optimum() -> JointPmf<f64> {
    BernoulliFamily::new(0.05, 0.1).unwrap().joint(0.855).unwrap()
}

pub fn bernoulli_region(mode: CribbingMode) -> RegionSpec<f64> {
    sr_region(&bernoulli_optimum(), mode, &CribbingVariant::Perfect).unwrap()
}

/// Simulator configuration on the binary optimum with default simulator settings.
pub fn sim_config(mode: CribbingMode, r0: f64, r1: f64, n: usize, seed: u64) -> SimConfig {
    let cfg = serde_json::json!({
        "n": n,
        "blocks": if mode == CribbingMode::NonCausal { 1 } else { 10 },
        "r0": r0,
        "r1": r1,
        "mode": mode,
        "variant": "perfect",
        "target": bernoulli_optimum(),
        "distortion": DistortionSpec::<f64>::hamming(2, 0.05, 0.1).unwrap(),
        "seed": seed,
    });
    serde_json::from_value(cfg).unwrap()
}

/// Rates `scale` times both bounds of the region.
pub fn scaled_config(mode: CribbingMode, scale: f64, n: usize, seed: u64) -> SimConfig {
    let r = bernoulli_region(mode);
    sim_config(mode, r.r0_lb * scale, (r.sum_rate_lb - r.r0_lb) * scale, n, seed)
}

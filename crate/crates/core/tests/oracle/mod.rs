//! Independent reference computations. Nothing here calls into the library's
//! numeric code; inputs and outputs are plain slices and vectors.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Best rank-1 residual of a 2×2×2 tensor (row-major, last index fastest) by
/// brute force over unit x = (cos θ, sin θ), y = (cos φ, sin φ) on a 0.01 grid.
/// For fixed x, y the optimal weighted z is the contraction `T ×₁ x ×₂ y`, and
/// the residual is `sqrt(‖T‖² − ‖z‖²)`.
pub fn grid_rank1_residual(t: &[f64; 8]) -> f64 {
    let norm2: f64 = t.iter().map(|v| v * v).sum();
    let steps = (PI / 0.01).ceil() as usize;
    let mut best = 0.0f64;
    for a in 0..steps {
        let (sa, ca) = (a as f64 * 0.01).sin_cos();
        for b in 0..steps {
            let (sb, cb) = (b as f64 * 0.01).sin_cos();
            let w = [ca * cb, ca * sb, sa * cb, sa * sb];
            let z0 = w[0] * t[0] + w[1] * t[2] + w[2] * t[4] + w[3] * t[6];
            let z1 = w[0] * t[1] + w[1] * t[3] + w[2] * t[5] + w[3] * t[7];
            best = best.max(z0 * z0 + z1 * z1);
        }
    }
    (norm2 - best).max(0.0).sqrt()
}

/// Per-cell inputs of a noise-free, shock-free, intervention-free run.
pub struct BalancedCase {
    pub beta: f64,
    pub m1: Vec<f64>,
    pub m23: Vec<f64>,
    pub r1: Vec<f64>,
    pub r2: Vec<f64>,
    pub cols: usize,
    pub export_rows: Vec<usize>,
    pub g_star: f64,
    pub pi_star: f64,
    pub okun_b: f64,
    pub u0: f64,
    pub u_min: f64,
    pub u_max: f64,
    pub import_propensity: f64,
}

/// `[growth, inflation, unemployment, trade, resistance]` per step, from the
/// closed forms: frame k sees `m1·(1+g*)^k`, momentum is evaluated cellwise and
/// nothing else changes.
pub fn balanced_frames(c: &BalancedCase, steps: usize) -> Vec<[f64; 5]> {
    let q = 1.0 + c.g_star;
    let momentum = |k: i32| -> Vec<f64> {
        (0..c.m1.len()).map(|n| c.beta * (c.m1[n] * q.powi(k) / c.r1[n] - c.m23[n] / c.r2[n])).collect()
    };
    let resistance = (c.r1.iter().sum::<f64>() + c.r2.iter().sum::<f64>()) / (2 * c.r1.len()) as f64;
    let mut prev: f64 = momentum(0).iter().sum();
    let mut u = c.u0;
    let mut out = Vec::with_capacity(steps);
    for k in 0..steps {
        let g = momentum(k as i32);
        let total: f64 = g.iter().sum();
        let growth = (total - prev) / prev.abs().max(1e-9);
        let gap = growth - c.g_star;
        u = (u - c.okun_b * gap).clamp(c.u_min, c.u_max);
        let exports: f64 = c.export_rows.iter().flat_map(|&i| &g[i * c.cols..(i + 1) * c.cols]).sum();
        let positive: f64 = g.iter().filter(|v| **v > 0.0).sum();
        out.push([growth, c.pi_star + 0.5 * gap, u, exports - c.import_propensity * positive, resistance]);
        prev = total;
    }
    out
}

/// Reference xoshiro256** seeded by SplitMix64.
pub struct RefXoshiro([u64; 4]);

impl RefXoshiro {
    pub fn new(seed: u64) -> Self {
        let mut x = seed;
        let mut next = || {
            x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
            let mut z = x;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^ (z >> 31)
        };
        Self([next(), next(), next(), next()])
    }

    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.0;
        let out = s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        out
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = (self.next_u64() >> 11) as f64 / 9007199254740992.0;
        let u2 = (self.next_u64() >> 11) as f64 / 9007199254740992.0;
        (-2.0 * (1.0 - u1).ln()).sqrt() * (2.0 * PI * u2).cos()
    }
}

/// `|a − b| ≤ tol·max(1, |b|)`.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

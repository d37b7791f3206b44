//! Dense brute-force reference implementations.
//!
//! Everything here works on full row-major amplitude arrays and plain
//! loops over every index tuple; it shares no code path with the sparse
//! engine beyond reading amplitudes and bin centers.

#![allow(dead_code)]

use freqswap::{ChannelId, Frequency, FrequencyGrid, PhotonState};
use num_complex::Complex64;
use rand::Rng;

#[derive(Clone, Debug)]
pub struct Dense {
    pub ids: Vec<ChannelId>,
    pub grids: Vec<FrequencyGrid>,
    pub data: Vec<Complex64>,
}

impl Dense {
    pub fn dims(&self) -> Vec<usize> {
        self.grids.iter().map(|g| g.bins()).collect()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn index_of(&self, tuple: &[usize]) -> usize {
        tuple
            .iter()
            .zip(self.dims())
            .fold(0, |acc, (&k, n)| acc * n + k)
    }

    pub fn tuple_of(&self, mut flat: usize) -> Vec<usize> {
        let dims = self.dims();
        let mut t = vec![0; dims.len()];
        for (i, n) in dims.iter().enumerate().rev() {
            t[i] = flat % n;
            flat /= n;
        }
        t
    }

    pub fn freqs(&self, tuple: &[usize]) -> Vec<Frequency> {
        tuple
            .iter()
            .zip(&self.grids)
            .map(|(&k, g)| g.center(k))
            .collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn pos(&self, id: ChannelId) -> usize {
        self.ids.iter().position(|&c| c == id).unwrap()
    }
}

pub fn to_dense(s: &PhotonState) -> Dense {
    let ids = s.channel_ids();
    let grids: Vec<FrequencyGrid> = s.channels().iter().map(|c| c.grid).collect();
    let total: usize = grids.iter().map(|g| g.bins()).product();
    let mut d = Dense {
        ids,
        grids,
        data: vec![Complex64::default(); total],
    };
    for flat in 0..total {
        let t = d.tuple_of(flat);
        d.data[flat] = s.amplitude(&t);
    }
    d
}

/// Max entrywise difference between a sparse state and a dense array on
/// the same channels and grids.
pub fn diff(s: &PhotonState, d: &Dense) -> f64 {
    assert_eq!(s.channel_ids(), d.ids, "channel lists differ");
    let grids: Vec<FrequencyGrid> = s.channels().iter().map(|c| c.grid).collect();
    assert_eq!(grids, d.grids, "grids differ");
    (0..d.len())
        .map(|flat| (s.amplitude(&d.tuple_of(flat)) - d.data[flat]).norm())
        .fold(0.0, f64::max)
}

pub fn tensor(a: &Dense, b: &Dense) -> Dense {
    let mut data = Vec::with_capacity(a.len() * b.len());
    for x in &a.data {
        for y in &b.data {
            data.push(x * y);
        }
    }
    Dense {
        ids: a.ids.iter().chain(&b.ids).copied().collect(),
        grids: a.grids.iter().chain(&b.grids).copied().collect(),
        data,
    }
}

pub fn normalize(a: &Dense) -> Dense {
    let n = a.norm_sqr().sqrt();
    Dense {
        data: a.data.iter().map(|x| x / n).collect(),
        ..a.clone()
    }
}

/// `(P ψ, (1-P) ψ)` for the sum window `[lo, lo + width)` on channels `ca`, `cb`.
pub fn project(
    a: &Dense,
    ca: ChannelId,
    cb: ChannelId,
    lo: Frequency,
    width: Frequency,
) -> (Dense, Dense) {
    let (pa, pb) = (a.pos(ca), a.pos(cb));
    let mut inside = a.clone();
    let mut outside = a.clone();
    for flat in 0..a.len() {
        let f = a.freqs(&a.tuple_of(flat));
        let s = f[pa] + f[pb];
        if s >= lo && s < lo + width {
            outside.data[flat] = Complex64::default();
        } else {
            inside.data[flat] = Complex64::default();
        }
    }
    (inside, outside)
}

fn accepts(w: Frequency, center: Frequency, bw: Frequency) -> bool {
    let (w, c, b) = (
        w.quanta() as i128,
        center.quanta() as i128,
        bw.quanta() as i128,
    );
    2 * w >= 2 * c - b && 2 * w < 2 * c + b
}

/// Firing probability and the (unnormalized) remaining-photon state.
pub fn detect(a: &Dense, ch: ChannelId, center: Frequency, bw: Frequency) -> (f64, Dense) {
    let p = a.pos(ch);
    let ids: Vec<ChannelId> = a.ids.iter().copied().filter(|&c| c != ch).collect();
    let grids: Vec<FrequencyGrid> = a
        .grids
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != p)
        .map(|(_, g)| *g)
        .collect();
    let total: usize = grids.iter().map(|g| g.bins()).product();
    let mut out = Dense {
        ids,
        grids,
        data: vec![Complex64::default(); total],
    };
    let mut prob = 0.0;
    for flat in 0..a.len() {
        let t = a.tuple_of(flat);
        if accepts(a.grids[p].center(t[p]), center, bw) {
            prob += a.data[flat].norm_sqr();
            let reduced: Vec<usize> = t
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != p)
                .map(|(_, k)| *k)
                .collect();
            let idx = out.index_of(&reduced);
            out.data[idx] += a.data[flat];
        }
    }
    (prob, out)
}

pub fn coincidence(
    a: &Dense,
    ca: ChannelId,
    wa: Frequency,
    ba: Frequency,
    cb: ChannelId,
    wb: Frequency,
    bb: Frequency,
) -> f64 {
    let (pa, pb) = (a.pos(ca), a.pos(cb));
    (0..a.len())
        .filter(|&flat| {
            let f = a.freqs(&a.tuple_of(flat));
            accepts(f[pa], wa, ba) && accepts(f[pb], wb, bb)
        })
        .map(|flat| a.data[flat].norm_sqr())
        .sum()
}

/// Sum-frequency merge by explicit double loop; output bin = k_a + k_b.
pub fn merge(a: &Dense, ca: ChannelId, cb: ChannelId, out: ChannelId, chi: f64) -> Dense {
    let (pa, pb) = (a.pos(ca), a.pos(cb));
    let ga = a.grids[pa];
    let gb = a.grids[pb];
    let gout = FrequencyGrid::new(
        ga.start() + gb.start(),
        ga.spacing(),
        ga.bins() + gb.bins() - 1,
    )
    .unwrap();
    let mut ids = Vec::new();
    let mut grids = Vec::new();
    for (i, (&id, &g)) in a.ids.iter().zip(&a.grids).enumerate() {
        if i == pa {
            ids.push(out);
            grids.push(gout);
        } else if i != pb {
            ids.push(id);
            grids.push(g);
        }
    }
    let total: usize = grids.iter().map(|g| g.bins()).product();
    let mut res = Dense {
        ids,
        grids,
        data: vec![Complex64::default(); total],
    };
    for flat in 0..a.len() {
        let t = a.tuple_of(flat);
        let mut r = Vec::new();
        for (i, &k) in t.iter().enumerate() {
            if i == pa {
                r.push(t[pa] + t[pb]);
            } else if i != pb {
                r.push(k);
            }
        }
        let idx = res.index_of(&r);
        res.data[idx] += a.data[flat] * chi;
    }
    res
}

/// Schmidt coefficients from the eigenvalues of the reduced density
/// matrix, via cyclic Jacobi on its real 2n x 2n embedding.
pub fn schmidt(a: &Dense, left: &[ChannelId]) -> Vec<f64> {
    let dims = a.dims();
    let is_left: Vec<bool> = a.ids.iter().map(|id| left.contains(id)).collect();
    let rows: usize = dims
        .iter()
        .zip(&is_left)
        .filter(|(_, l)| **l)
        .map(|(n, _)| n)
        .product();
    let cols: usize = dims
        .iter()
        .zip(&is_left)
        .filter(|(_, l)| !**l)
        .map(|(n, _)| n)
        .product();
    let mut m = vec![vec![Complex64::default(); cols]; rows];
    for flat in 0..a.len() {
        let t = a.tuple_of(flat);
        let (mut r, mut c) = (0, 0);
        for ((&k, &n), &l) in t.iter().zip(&dims).zip(&is_left) {
            if l {
                r = r * n + k;
            } else {
                c = c * n + k;
            }
        }
        m[r][c] = a.data[flat];
    }
    // rho = M M^dagger
    let mut rho = vec![vec![Complex64::default(); rows]; rows];
    for i in 0..rows {
        for j in 0..rows {
            rho[i][j] = (0..cols).map(|k| m[i][k] * m[j][k].conj()).sum();
        }
    }
    let n2 = 2 * rows;
    let mut s = vec![vec![0.0; n2]; n2];
    for i in 0..rows {
        for j in 0..rows {
            s[i][j] = rho[i][j].re;
            s[i + rows][j + rows] = rho[i][j].re;
            s[i][j + rows] = -rho[i][j].im;
            s[i + rows][j] = rho[i][j].im;
        }
    }
    let mut eig = jacobi_eigenvalues(s);
    eig.sort_by(|x, y| y.total_cmp(x));
    // each eigenvalue of rho appears twice in the embedding
    let mut coeffs: Vec<f64> = eig.chunks(2).map(|p| p[0].max(0.0).sqrt()).collect();
    let top = coeffs[0];
    coeffs.retain(|&c| c > 1e-7 * top);
    coeffs
}

#[allow(clippy::needless_range_loop)]
fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

pub fn entropy(coeffs: &[f64]) -> f64 {
    coeffs
        .iter()
        .map(|c| c * c)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum()
}

/// Direct DFT of a two-channel dense state on a time grid, normalized so
/// that `Σ density Δt² = 1`. Row index is `t1`.
pub fn time_density(a: &Dense, t_start: f64, dt: f64, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i1 in 0..n {
        let t1 = t_start + i1 as f64 * dt;
        for i2 in 0..n {
            let t2 = t_start + i2 as f64 * dt;
            let mut acc = Complex64::default();
            for flat in 0..a.len() {
                let f = a.freqs(&a.tuple_of(flat));
                let phase = -(f[0].units() * t1 + f[1].units() * t2);
                acc += a.data[flat] * Complex64::new(phase.cos(), phase.sin());
            }
            out[i1 * n + i2] = acc.norm_sqr();
        }
    }
    let total: f64 = out.iter().sum::<f64>() * dt * dt;
    out.iter().map(|v| v / total).collect()
}

/// `|Σ_k e^{i ω_k τ}|²` for a flat comb, the closed-form correlation
/// profile of a flat biphoton as a function of `τ = t1 - t2`.
pub fn comb_profile(omegas: &[f64], tau: f64) -> f64 {
    let (re, im) = omegas.iter().fold((0.0, 0.0), |(re, im), w| {
        (re + (w * tau).cos(), im + (w * tau).sin())
    });
    re * re + im * im
}

pub fn random_dense_state<R: Rng>(
    rng: &mut R,
    ids: &[ChannelId],
    bins: &[usize],
    spacing: Frequency,
) -> PhotonState {
    use freqswap::Channel;
    let channels: Vec<Channel> = ids
        .iter()
        .zip(bins)
        .map(|(&id, &n)| {
            let start = Frequency::from_quanta(spacing.quanta() * rng.gen_range(10..40));
            Channel::new(id, FrequencyGrid::new(start, spacing, n).unwrap())
        })
        .collect();
    let total: usize = bins.iter().product();
    let probe = Dense {
        ids: ids.to_vec(),
        grids: channels.iter().map(|c| c.grid).collect(),
        data: vec![],
    };
    let entries: Vec<_> = (0..total)
        .map(|flat| {
            (
                probe.tuple_of(flat),
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            )
        })
        .collect();
    PhotonState::from_entries(channels, entries)
        .unwrap()
        .normalize()
        .unwrap()
}

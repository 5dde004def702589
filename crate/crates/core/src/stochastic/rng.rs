use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// A reproducible random stream: one master seed, many independent stream ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        RngStream {
            master_seed,
            stream_id,
        }
    }

    pub fn keyed(master_seed: u64, key: StreamKey) -> Self {
        Self::new(master_seed, key.id())
    }

    /// Fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Purpose of a stream; keeps e.g. initial-field and noise draws disjoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    Noise,
    Initial,
    Path,
    Study,
}

impl Stage {
    fn tag(self) -> u64 {
        match self {
            Stage::Noise => 0x6e6f_6973,
            Stage::Initial => 0x696e_6974,
            Stage::Path => 0x7061_7468,
            Stage::Study => 0x7374_7564,
        }
    }
}

/// Coordinates of a random draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub stage: Stage,
    pub ell: u64,
    pub m: i64,
    /// 0 for divergence-free, 1 for curl-free, free otherwise.
    pub family: u64,
    pub replicate: u64,
}

impl StreamKey {
    pub fn new(stage: Stage, ell: usize, m: i64, family: u64, replicate: u64) -> Self {
        StreamKey {
            stage,
            ell: ell as u64,
            m,
            family,
            replicate,
        }
    }

    /// Deterministic 64-bit id; a chained SplitMix64 mix of all fields.
    pub fn id(&self) -> u64 {
        let mut h = splitmix(self.stage.tag());
        for v in [self.ell, self.m as u64, self.family, self.replicate] {
            h = splitmix(h ^ v.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        }
        h
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn standard_normal<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Centred circular complex Gaussian with E|X|² = `variance`.
pub fn complex_normal<R: rand::Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (0.5 * variance).sqrt();
    Complex64::new(s * standard_normal(rng), s * standard_normal(rng))
}

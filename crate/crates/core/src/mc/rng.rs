use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// The task family a random stream belongs to.
///
/// Linear and quotient estimators share [`StreamKind::GameValue`]: with an
/// all-singleton partition the quotient estimator for group `j` replays the
/// linear estimator for feature `j` draw for draw.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StreamKind {
    GameValue = 1,
    Coalitional = 2,
    TwoStep = 3,
    DataGeneration = 4,
    Sampler = 5,
}

/// Identifies one independent random stream under a user seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamId {
    pub kind: StreamKind,
    /// Feature or group index.
    pub index: u64,
    pub replicate: u64,
}

impl StreamId {
    pub fn new(kind: StreamKind, index: usize, replicate: u64) -> Self {
        StreamId {
            kind,
            index: index as u64,
            replicate,
        }
    }
}

/// The generator for `(seed, id)`.
///
/// `(seed, kind, index)` form the ChaCha key and `replicate` selects the
/// stream under that key, so distinct ids never share keystream.
pub fn stream_rng(seed: u64, id: StreamId) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(id.kind as u64).to_le_bytes());
    key[16..24].copy_from_slice(&id.index.to_le_bytes());
    key[24..32].copy_from_slice(b"mcgame\x00\x01");
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(id.replicate);
    rng
}

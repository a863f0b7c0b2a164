//! Deterministic random streams.
//!
//! Every session (one detector position) and every run inside it gets its
//! own ChaCha8 stream, keyed by the master seed and selected with
//! `stream = session << 32 | run`. The session-level drift process uses
//! run index `u32::MAX`. Runs therefore draw the same numbers no matter
//! which order, or which thread, they execute on.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

pub const DRIFT_STREAM: u32 = u32::MAX;

pub fn stream(master_seed: u64, session: u32, run: u32) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream((u64::from(session) << 32) | u64::from(run));
    rng
}

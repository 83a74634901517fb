//! Execution-mode switch for the data-parallel paths.
//!
//! With the `parallel` feature enabled the chain evaluation fans out over
//! a rayon pool; forcing sequential mode at runtime lets one process (the
//! benchmark suite) measure both code paths. Without the feature the
//! crate is compiled sequential and the flag is inert.

use std::sync::atomic::{AtomicBool, Ordering};

static FORCE_SEQUENTIAL: AtomicBool = AtomicBool::new(false);

/// Force the parallel paths to run on the calling thread.
pub fn set_sequential(force: bool) {
    FORCE_SEQUENTIAL.store(force, Ordering::Relaxed);
}

/// true when parallel paths must run sequentially
pub fn sequential() -> bool {
    if cfg!(feature = "parallel") {
        FORCE_SEQUENTIAL.load(Ordering::Relaxed)
    } else {
        true
    }
}

use std::fmt;
use std::sync::{Arc, Condvar, Mutex};
use std::time::{Duration, Instant};

/// One-shot "user is ready" flag that may be raised from any thread.
///
/// A delivered signal is consumed by the next successful wait.
#[derive(Clone, Default)]
pub struct UserSignal {
    inner: Arc<(Mutex<bool>, Condvar)>,
}

impl UserSignal {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn deliver(&self) {
        let (lock, cvar) = &*self.inner;
        *lock.lock().unwrap_or_else(|e| e.into_inner()) = true;
        cvar.notify_all();
    }

    pub fn is_delivered(&self) -> bool {
        *self.inner.0.lock().unwrap_or_else(|e| e.into_inner())
    }

    /// Blocks until delivered or `timeout` elapses. Returns whether the
    /// signal arrived (and consumes it if so).
    pub fn wait_timeout(&self, timeout: Duration) -> bool {
        let (lock, cvar) = &*self.inner;
        let deadline = Instant::now() + timeout;
        let mut delivered = lock.lock().unwrap_or_else(|e| e.into_inner());
        while !*delivered {
            let now = Instant::now();
            if now >= deadline {
                return false;
            }
            delivered = cvar.wait_timeout(delivered, deadline - now).unwrap_or_else(|e| e.into_inner()).0;
        }
        *delivered = false;
        true
    }
}

impl fmt::Debug for UserSignal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UserSignal").field("delivered", &self.is_delivered()).finish()
    }
}

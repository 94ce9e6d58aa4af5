use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

/// Cooperative resource limits checked by the SAT solver and the engines.
#[derive(Debug, Clone, Default)]
pub struct Limits {
    pub deadline: Option<Instant>,
    pub interrupt: Option<Arc<AtomicBool>>,
}

impl Limits {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn timeout(d: Duration) -> Self {
        Limits {
            deadline: Some(Instant::now() + d),
            interrupt: None,
        }
    }

    pub fn with_interrupt(mut self, flag: Arc<AtomicBool>) -> Self {
        self.interrupt = Some(flag);
        self
    }

    pub fn is_unlimited(&self) -> bool {
        self.deadline.is_none() && self.interrupt.is_none()
    }

    pub fn exhausted(&self) -> bool {
        if let Some(flag) = &self.interrupt {
            if flag.load(Ordering::Relaxed) {
                return true;
            }
        }
        matches!(self.deadline, Some(d) if Instant::now() >= d)
    }
}

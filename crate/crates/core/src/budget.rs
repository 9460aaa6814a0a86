//! Node budgets for long searches.
//!
//! Every potentially unbounded search (backtracking, neighbor walks, gluing
//! enumeration) charges nodes against a shared budget so callers can bound
//! runtime. Exhaustion is a distinct, typed outcome — never a silent pass.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

/// Environment variable consulted for the default node budget.
pub const BUDGET_ENV: &str = "SALEMFORGE_BUDGET_NODES";

const DEFAULT_NODES: u64 = 500_000_000;

#[derive(Debug, Clone, thiserror::Error)]
#[error("search budget exhausted after {spent} nodes (limit {limit})")]
pub struct BudgetError {
    pub spent: u64,
    pub limit: u64,
}

/// Shared, thread-safe countdown of search nodes.
#[derive(Debug, Clone)]
pub struct Budget {
    spent: Arc<AtomicU64>,
    limit: u64,
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget {
            spent: Arc::new(AtomicU64::new(0)),
            limit,
        }
    }

    /// Budget from `SALEMFORGE_BUDGET_NODES`, or the built-in default.
    pub fn from_env() -> Self {
        let limit = std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(DEFAULT_NODES);
        Budget::new(limit)
    }

    /// Charge `n` nodes; errors once the limit is crossed.
    pub fn charge(&self, n: u64) -> Result<(), BudgetError> {
        let before = self.spent.fetch_add(n, Ordering::Relaxed);
        if before + n > self.limit {
            Err(BudgetError {
                spent: before + n,
                limit: self.limit,
            })
        } else {
            Ok(())
        }
    }

    pub fn spent(&self) -> u64 {
        self.spent.load(Ordering::Relaxed)
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::from_env()
    }
}

use alloc::string::String;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicU64, Ordering};

use crate::CoreError;

static NEXT_REGISTRY_ID: AtomicU64 = AtomicU64::new(1);

/// Handle to a bosonic mode inside one [`ModeRegistry`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeId {
    pub(crate) registry: u64,
    pub(crate) index: u32,
}

impl ModeId {
    pub fn index(&self) -> u32 {
        self.index
    }
}

/// Append-only allocator for labeled modes.
///
/// Every loss channel and detection split mints a fresh mode here, which
/// guarantees the corresponding vacuum inputs are statistically independent.
#[derive(Debug, Clone)]
pub struct ModeRegistry {
    id: u64,
    labels: Vec<String>,
    fresh_counter: u32,
}

impl ModeRegistry {
    pub fn new() -> Self {
        ModeRegistry {
            id: NEXT_REGISTRY_ID.fetch_add(1, Ordering::Relaxed),
            labels: Vec::new(),
            fresh_counter: 0,
        }
    }

    pub fn register(&mut self, label: &str) -> ModeId {
        assert!(!label.is_empty(), "mode labels must be non-empty");
        let index = self.labels.len() as u32;
        self.labels.push(String::from(label));
        ModeId { registry: self.id, index }
    }

    /// Mints a mode with a generated label, used for vacuum ancillas.
    pub fn fresh(&mut self, prefix: &str) -> ModeId {
        self.fresh_counter += 1;
        let mut label = String::from(prefix);
        label.push('#');
        push_u32(&mut label, self.fresh_counter);
        self.register(&label)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn label(&self, mode: ModeId) -> Option<&str> {
        if mode.registry != self.id {
            return None;
        }
        self.labels.get(mode.index as usize).map(|s| s.as_str())
    }

    pub fn contains(&self, mode: ModeId) -> bool {
        mode.registry == self.id && (mode.index as usize) < self.labels.len()
    }

    pub fn check(&self, mode: ModeId) -> Result<(), CoreError> {
        if self.contains(mode) {
            Ok(())
        } else {
            Err(CoreError::UnknownMode)
        }
    }

    pub fn modes(&self) -> impl Iterator<Item = ModeId> + '_ {
        let id = self.id;
        (0..self.labels.len() as u32).map(move |index| ModeId { registry: id, index })
    }
}

impl Default for ModeRegistry {
    fn default() -> Self {
        Self::new()
    }
}

fn push_u32(out: &mut String, mut v: u32) {
    let mut digits = [0u8; 10];
    let mut n = 0;
    loop {
        digits[n] = b'0' + (v % 10) as u8;
        v /= 10;
        n += 1;
        if v == 0 {
            break;
        }
    }
    for i in (0..n).rev() {
        out.push(digits[i] as char);
    }
}

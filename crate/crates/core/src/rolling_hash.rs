//! Rolling hashes over fixed-size byte windows.
//!
//! The compressor hashes every `N`-byte neighborhood of its input, so the
//! hash has to update in constant time per step. [`RabinKarp`] is the only
//! implementation shipped; other window hashes can be plugged in through
//! [`WindowHash`].
//!
//! Digests are only comparable when they were produced with identical hash
//! constants. The values below are part of the signature interchange
//! contract and must not change.

use thiserror::Error;

/// Polynomial base.
pub const BASE: u64 = 257;
/// Modulus, the Mersenne prime 2^61 - 1.
pub const MODULUS: u64 = (1u64 << 61) - 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HashError {
    #[error("window size must be at least 1")]
    ZeroWindow,
    #[error("window has {actual} bytes, expected {expected}")]
    WindowSizeMismatch { expected: usize, actual: usize },
}

/// A hash over a sliding window of fixed size.
pub trait WindowHash: Sized {
    /// Hashes the first window. `window.len()` must equal `n`.
    fn init(window: &[u8], n: usize) -> Result<Self, HashError>;

    /// Slides the window one byte to the right.
    fn roll(&mut self, outgoing: u8, incoming: u8);

    fn value(&self) -> u64;

    fn window_size(&self) -> usize;
}

#[inline]
fn mul_mod(a: u64, b: u64) -> u64 {
    let product = a as u128 * b as u128;
    let folded = (product as u64 & MODULUS) + (product >> 61) as u64;
    if folded >= MODULUS {
        folded - MODULUS
    } else {
        folded
    }
}

#[inline]
fn add_mod(a: u64, b: u64) -> u64 {
    let sum = a + b;
    if sum >= MODULUS {
        sum - MODULUS
    } else {
        sum
    }
}

/// Rabin-Karp polynomial hash: `sum(window[i] * BASE^(N-1-i)) mod MODULUS`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RabinKarp {
    value: u64,
    window_size: usize,
    // BASE^(N-1) mod MODULUS, the weight of the outgoing byte
    top_power: u64,
}

impl RabinKarp {
    fn top_power(n: usize) -> u64 {
        (1..n).fold(1, |acc, _| mul_mod(acc, BASE))
    }
}

impl WindowHash for RabinKarp {
    fn init(window: &[u8], n: usize) -> Result<Self, HashError> {
        if n == 0 {
            return Err(HashError::ZeroWindow);
        }
        if window.len() != n {
            return Err(HashError::WindowSizeMismatch {
                expected: n,
                actual: window.len(),
            });
        }
        let value = window
            .iter()
            .fold(0, |acc, &b| add_mod(mul_mod(acc, BASE), b as u64));
        Ok(Self {
            value,
            window_size: n,
            top_power: Self::top_power(n),
        })
    }

    #[inline]
    fn roll(&mut self, outgoing: u8, incoming: u8) {
        let without = add_mod(self.value, MODULUS - mul_mod(outgoing as u64, self.top_power));
        self.value = add_mod(mul_mod(without, BASE), incoming as u64);
    }

    #[inline]
    fn value(&self) -> u64 {
        self.value
    }

    fn window_size(&self) -> usize {
        self.window_size
    }
}

/// Iterator over the hash of every `n`-byte window of an input, in order.
///
/// Yields `len - n + 1` values, or none when the input is shorter than `n`.
pub struct WindowHashes<'a, H> {
    input: &'a [u8],
    state: Option<H>,
    next_start: usize,
}

impl<'a, H: WindowHash> WindowHashes<'a, H> {
    pub fn new(input: &'a [u8], n: usize) -> Result<Self, HashError> {
        if n == 0 {
            return Err(HashError::ZeroWindow);
        }
        let state = if input.len() >= n {
            Some(H::init(&input[..n], n)?)
        } else {
            None
        };
        Ok(Self {
            input,
            state,
            next_start: 0,
        })
    }
}

impl<H: WindowHash> Iterator for WindowHashes<'_, H> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let state = self.state.as_mut()?;
        let n = state.window_size();
        let start = self.next_start;
        if start + n > self.input.len() {
            return None;
        }
        if start > 0 {
            state.roll(self.input[start - 1], self.input[start + n - 1]);
        }
        self.next_start += 1;
        Some(state.value())
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let remaining = match &self.state {
            Some(s) => (self.input.len() + 1).saturating_sub(self.next_start + s.window_size()),
            None => 0,
        };
        (remaining, Some(remaining))
    }
}

impl<H: WindowHash> ExactSizeIterator for WindowHashes<'_, H> {}

/// Hashes of every window of `input` under the default Rabin-Karp hash.
pub fn rabin_karp_windows(input: &[u8], n: usize) -> Result<WindowHashes<'_, RabinKarp>, HashError> {
    WindowHashes::new(input, n)
}

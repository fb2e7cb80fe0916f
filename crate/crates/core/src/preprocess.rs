//! Optional input normalization applied before compression.

use std::borrow::Cow;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Preprocess {
    /// ASCII lowercase.
    pub lowercase: bool,
    /// Replace every run of ASCII whitespace with a single space.
    pub collapse_whitespace: bool,
}

impl Preprocess {
    pub fn is_identity(&self) -> bool {
        !self.lowercase && !self.collapse_whitespace
    }

    pub fn apply<'a>(&self, input: &'a [u8]) -> Cow<'a, [u8]> {
        if self.is_identity() {
            return Cow::Borrowed(input);
        }
        let mut out = Vec::with_capacity(input.len());
        let mut in_space = false;
        for &b in input {
            if self.collapse_whitespace && b.is_ascii_whitespace() {
                if !in_space {
                    out.push(b' ');
                }
                in_space = true;
                continue;
            }
            in_space = false;
            out.push(if self.lowercase { b.to_ascii_lowercase() } else { b });
        }
        Cow::Owned(out)
    }
}

//! Signature records and their CSV form.
//!
//! A signature is one line of plain text:
//!
//! ```text
//! path,file_length,C,N,digest_length,digest
//! ```
//!
//! Fields are separated by a bare comma, integers are base 10, lines end in
//! `\n`. Lines starting with `#` are comments and blank lines are ignored,
//! so signature files can be concatenated.

use std::fmt;
use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::compressor::{compress, is_low_confidence, Digest, Params};

/// Column header, written as a comment line.
pub const HEADER: &str = "#filename,fileLength,C,N,digestLength,digest";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("path {0:?} contains a comma, newline or carriage return, or starts with '#', and cannot be stored in a signature")]
    PathNotSerializable(String),
    #[error("C and N must be positive (got C={c}, N={n})")]
    ZeroParameter { c: u64, n: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("expected 6 comma-separated fields, found {0}")]
    FieldCount(usize),
    #[error("field {field} is not a base-10 integer: {value:?}")]
    NonNumericField { field: &'static str, value: String },
    #[error("declared digest length {declared} but digest has {actual} characters")]
    LengthMismatch { declared: usize, actual: usize },
    #[error(transparent)]
    Invalid(#[from] SignatureError),
}

#[derive(Debug, Error)]
pub enum ReadError {
    #[error("line {line}: {source}")]
    Parse { line: usize, source: ParseError },
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn path_is_serializable(path: &str) -> bool {
    !path.starts_with('#') && !path.bytes().any(|b| matches!(b, b',' | b'\n' | b'\r'))
}

/// Header plus digest of one document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    path: String,
    file_length: u64,
    c: u64,
    n: u64,
    digest: Digest,
}

impl Signature {
    pub fn new(
        path: impl Into<String>,
        file_length: u64,
        c: u64,
        n: u64,
        digest: Digest,
    ) -> Result<Self, SignatureError> {
        let path = path.into();
        if !path_is_serializable(&path) {
            return Err(SignatureError::PathNotSerializable(path));
        }
        if c == 0 || n == 0 {
            return Err(SignatureError::ZeroParameter { c, n });
        }
        Ok(Self {
            path,
            file_length,
            c,
            n,
            digest,
        })
    }

    /// Compresses `input` and wraps the digest with its header.
    pub fn build(path: impl Into<String>, input: &[u8], params: &Params) -> Result<Self, SignatureError> {
        let path = path.into();
        if !path_is_serializable(&path) {
            return Err(SignatureError::PathNotSerializable(path));
        }
        Self::new(
            path,
            input.len() as u64,
            params.c(),
            params.n() as u64,
            compress(input, params),
        )
    }

    /// Parses one record line. Comment and blank lines are an error here;
    /// use [`parse_line`] to skip them.
    pub fn parse(line: &str) -> Result<Self, ParseError> {
        let line = line.strip_suffix('\n').unwrap_or(line);
        let line = line.strip_suffix('\r').unwrap_or(line);
        let fields: Vec<&str> = line.splitn(6, ',').collect();
        if fields.len() != 6 {
            return Err(ParseError::FieldCount(fields.len()));
        }
        let file_length = parse_int(fields[1], "file_length")?;
        let c = parse_int(fields[2], "C")?;
        let n = parse_int(fields[3], "N")?;
        let declared = parse_int(fields[4], "digest_length")? as usize;
        let digest = fields[5];
        if declared != digest.len() {
            return Err(ParseError::LengthMismatch {
                declared,
                actual: digest.len(),
            });
        }
        Ok(Self::new(fields[0], file_length, c, n, Digest::from(digest))?)
    }

    pub fn path(&self) -> &str {
        &self.path
    }

    /// Length in bytes of the (possibly preprocessed) document.
    pub fn file_length(&self) -> u64 {
        self.file_length
    }

    pub fn c(&self) -> u64 {
        self.c
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn digest(&self) -> &Digest {
        &self.digest
    }

    pub fn digest_length(&self) -> usize {
        self.digest.len()
    }

    /// Signatures can only be compared when both were made with the same
    /// C and N.
    pub fn is_compatible(&self, other: &Signature) -> bool {
        compatible(self, other)
    }

    /// Digest size far from the expected `file_length / C`.
    pub fn is_low_confidence(&self) -> bool {
        is_low_confidence(self.digest_length(), self.file_length, self.c, self.n)
    }

    /// False when the digest is longer than the document it came from,
    /// which no compressor run can produce.
    pub fn is_length_consistent(&self) -> bool {
        self.file_length >= self.digest_length() as u64
    }

    /// The record as a single `\n`-terminated line.
    pub fn to_line(&self) -> String {
        format!("{self}\n")
    }
}

/// The record without a line terminator.
impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{},{},{}",
            self.path,
            self.file_length,
            self.c,
            self.n,
            self.digest.len(),
            self.digest
        )
    }
}

pub fn compatible(a: &Signature, b: &Signature) -> bool {
    a.c == b.c && a.n == b.n
}

fn parse_int(field: &str, name: &'static str) -> Result<u64, ParseError> {
    let err = || ParseError::NonNumericField {
        field: name,
        value: field.to_owned(),
    };
    if field.is_empty() || !field.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    field.parse().map_err(|_| err())
}

/// Parses a line of a signature file, returning `None` for comments and
/// blank lines.
pub fn parse_line(line: &str) -> Result<Option<Signature>, ParseError> {
    let trimmed = line.trim_end_matches(['\n', '\r']);
    if trimmed.trim().is_empty() || trimmed.starts_with('#') {
        return Ok(None);
    }
    Signature::parse(trimmed).map(Some)
}

/// Reads every record of a signature file. Line numbers in errors are
/// 1-based.
pub fn read_signatures<R: BufRead>(reader: R) -> Result<Vec<Signature>, ReadError> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        match parse_line(&line) {
            Ok(Some(sig)) => out.push(sig),
            Ok(None) => {}
            Err(source) => return Err(ReadError::Parse { line: idx + 1, source }),
        }
    }
    Ok(out)
}

pub fn write_signatures<'a, W, I>(mut writer: W, signatures: I, header: bool) -> io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a Signature>,
{
    if header {
        writeln!(writer, "{HEADER}")?;
    }
    for sig in signatures {
        writeln!(writer, "{sig}")?;
    }
    writer.flush()
}

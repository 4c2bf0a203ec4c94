//! Broadcasting and flag parsing.

use crate::error::BatchError;
use vol_core::OptionFlag;

/// Common length of a set of columns.
///
/// Length-1 columns act as scalars and stretch to any length, including zero.
/// Every other column must have the same length.
pub fn broadcast(lengths: &[usize]) -> Result<usize, BatchError> {
    let names: Vec<String> = (0..lengths.len()).map(|i| format!("#{i}")).collect();
    let named: Vec<(&str, usize)> = names.iter().map(String::as_str).zip(lengths.iter().copied()).collect();
    broadcast_named(&named)
}

pub(crate) fn broadcast_named(columns: &[(&str, usize)]) -> Result<usize, BatchError> {
    let n = match columns.iter().map(|&(_, len)| len).find(|&len| len != 1) {
        Some(n) => n,
        None => return Ok(usize::from(!columns.is_empty())),
    };
    for &(name, len) in columns {
        if len != 1 && len != n {
            return Err(BatchError::ShapeMismatch {
                index: len.min(n),
                column: name.to_owned(),
                len,
                expected: n,
            });
        }
    }
    Ok(n)
}

/// Parses `c`/`p` tokens, case-insensitively.
pub fn parse_flags<S: AsRef<str>>(tokens: &[S]) -> Result<Vec<OptionFlag>, BatchError> {
    tokens
        .iter()
        .enumerate()
        .map(|(index, tok)| {
            tok.as_ref().parse().map_err(|_| BatchError::BadFlag { index, token: tok.as_ref().to_owned() })
        })
        .collect()
}

/// Byte-per-row variant of [`parse_flags`] for columnar callers.
pub fn parse_flag_bytes(bytes: &[u8]) -> Result<Vec<OptionFlag>, BatchError> {
    bytes
        .iter()
        .enumerate()
        .map(|(index, &b)| {
            OptionFlag::from_byte(b)
                .map_err(|_| BatchError::BadFlag { index, token: String::from_utf8_lossy(&[b]).into_owned() })
        })
        .collect()
}

/// Row `i` of a column that is either scalar or full length.
#[inline]
pub(crate) fn at<T: Copy>(col: &[T], i: usize) -> T {
    if col.len() == 1 {
        col[0]
    } else {
        col[i]
    }
}

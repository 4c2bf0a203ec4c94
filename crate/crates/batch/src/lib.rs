//! Batched pricing, Greeks and implied volatility over option chains.
//!
//! Inputs are columns that broadcast against each other (length 1 or `N`).
//! A batch is validated in full before any row is computed; after that, rows
//! are independent and failures are reported per row. Work is split across
//! `FASTVOL_THREADS` workers (default: available parallelism) in contiguous
//! chunks, and the result does not depend on the worker count.
//!
//! ```
//! use vol_batch::{iv_columns, price_columns, BatchOptions, Contracts};
//! use vol_core::{IvMethod, Model, OptionFlag::{Call, Put}};
//!
//! let flags = [Call, Call, Put];
//! let strikes = [95.0, 100.0, 105.0];
//! let c = Contracts { flag: &flags, underlying: &[100.0], strike: &strikes, t: &[0.25], r: &[0.05], q: &[] };
//! let opts = BatchOptions::default();
//! let prices = price_columns(Model::BlackScholes, &c, &[0.2], &opts)?;
//! let iv = iv_columns(Model::BlackScholes, IvMethod::Lbr, &c, &prices, &opts)?;
//! assert!(iv.iv.iter().all(|s| (s - 0.2).abs() < 1e-12));
//! # Ok::<(), vol_batch::BatchError>(())
//! ```

mod engine;
mod error;
mod format;
mod pool;
mod shape;
mod table;

pub use engine::{greeks_columns, iv_columns, iv_row, price_columns, BatchOptions, Contracts, GreekColumns, IvColumns};
pub use error::BatchError;
pub use format::{format_output, format_plain, format_real, parse_csv, Format};
pub use pool::{chunk_size, default_workers, env_workers, THREADS_ENV};
pub use shape::{broadcast, parse_flag_bytes, parse_flags};
pub use table::{batch_greeks, batch_iv, batch_price, ChainTable, Column, STRIKE_NAMES, UNDERLYING_NAMES};

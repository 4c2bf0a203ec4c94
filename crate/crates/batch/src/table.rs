//! Named columns of equal length and the table-level batch operations.

use crate::engine::{greeks_columns, iv_columns, price_columns, BatchOptions, Contracts};
use crate::error::BatchError;
use vol_core::{IvMethod, Model, OptionFlag, SolveStatus};

pub const UNDERLYING_NAMES: [&str; 3] = ["underlying", "S", "F"];
pub const STRIKE_NAMES: [&str; 2] = ["strike", "K"];

#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    Flag(Vec<OptionFlag>),
    Real(Vec<f64>),
    Status(Vec<SolveStatus>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Flag(v) => v.len(),
            Column::Real(v) => v.len(),
            Column::Status(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChainTable {
    len: usize,
    columns: Vec<(String, Column)>,
}

impl ChainTable {
    pub fn new(len: usize) -> Self {
        Self { len, columns: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Adds a column, or replaces the one with the same name in place.
    pub fn insert(&mut self, name: &str, column: Column) -> Result<(), BatchError> {
        if column.len() != self.len {
            return Err(BatchError::ShapeMismatch {
                index: column.len().min(self.len),
                column: name.to_owned(),
                len: column.len(),
                expected: self.len,
            });
        }
        match self.columns.iter_mut().find(|(n, _)| n == name) {
            Some(slot) => slot.1 = column,
            None => self.columns.push((name.to_owned(), column)),
        }
        Ok(())
    }

    pub fn with(mut self, name: &str, column: Column) -> Result<Self, BatchError> {
        self.insert(name, column)?;
        Ok(self)
    }

    pub fn get(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|(n, _)| n == name).map(|(_, c)| c)
    }

    pub fn real(&self, name: &str) -> Option<&[f64]> {
        match self.get(name) {
            Some(Column::Real(v)) => Some(v),
            _ => None,
        }
    }

    pub fn flags(&self) -> Option<&[OptionFlag]> {
        match self.get("flag") {
            Some(Column::Flag(v)) => Some(v),
            _ => None,
        }
    }

    pub fn status(&self) -> Option<&[SolveStatus]> {
        match self.get("status") {
            Some(Column::Status(v)) => Some(v),
            _ => None,
        }
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|(n, _)| n.as_str())
    }

    pub fn columns(&self) -> impl Iterator<Item = (&str, &Column)> {
        self.columns.iter().map(|(n, c)| (n.as_str(), c))
    }

    fn find_real<'a>(&self, names: &[&'a str]) -> Result<(&'a str, &[f64]), BatchError> {
        names
            .iter()
            .find_map(|&n| self.real(n).map(|c| (n, c)))
            .ok_or_else(|| BatchError::MissingColumn { column: names.join("|") })
    }

    fn require_real(&self, names: &[&str]) -> Result<&[f64], BatchError> {
        self.find_real(names).map(|(_, c)| c)
    }

    /// Contract view plus the table's own names for the underlying and strike.
    fn contracts(&self) -> Result<(Contracts<'_>, [&'static str; 2]), BatchError> {
        let flag = self.flags().ok_or_else(|| BatchError::MissingColumn { column: "flag".into() })?;
        let (underlying_name, underlying) = self.find_real(&UNDERLYING_NAMES)?;
        let (strike_name, strike) = self.find_real(&STRIKE_NAMES)?;
        let contracts = Contracts {
            flag,
            underlying,
            strike,
            t: self.require_real(&["t"])?,
            r: self.require_real(&["r"])?,
            q: self.real("q").unwrap_or(&[]),
        };
        Ok((contracts, [underlying_name, strike_name]))
    }
}

/// Reports errors under the table's column names rather than the engine's.
fn renamed([underlying, strike]: [&str; 2]) -> impl Fn(BatchError) -> BatchError + '_ {
    move |e| {
        let rename = |column: String| match column.as_str() {
            "underlying" => underlying.to_owned(),
            "strike" => strike.to_owned(),
            _ => column,
        };
        match e {
            BatchError::ShapeMismatch { index, column, len, expected } => {
                BatchError::ShapeMismatch { index, column: rename(column), len, expected }
            }
            BatchError::NonFiniteInput { index, column, value } => {
                BatchError::NonFiniteInput { index, column: rename(column), value }
            }
            BatchError::Domain { index, column, detail } => BatchError::Domain { index, column: rename(column), detail },
            other => other,
        }
    }
}

/// Copy of `table` with a `price` column computed from `sigma`.
pub fn batch_price(model: Model, table: &ChainTable, opts: &BatchOptions) -> Result<ChainTable, BatchError> {
    let (c, names) = table.contracts()?;
    let prices = price_columns(model, &c, table.require_real(&["sigma"])?, opts).map_err(renamed(names))?;
    table.clone().with("price", Column::Real(prices))
}

/// Copy of `table` with `iv` and `status` columns inverted from `price`.
pub fn batch_iv(model: Model, method: IvMethod, table: &ChainTable, opts: &BatchOptions) -> Result<ChainTable, BatchError> {
    let (c, names) = table.contracts()?;
    let iv = iv_columns(model, method, &c, table.require_real(&["price"])?, opts).map_err(renamed(names))?;
    table.clone().with("iv", Column::Real(iv.iv))?.with("status", Column::Status(iv.status))
}

/// Copy of `table` with the five Greek columns computed from `sigma`.
pub fn batch_greeks(model: Model, table: &ChainTable, opts: &BatchOptions) -> Result<ChainTable, BatchError> {
    let (c, names) = table.contracts()?;
    let g = greeks_columns(model, &c, table.require_real(&["sigma"])?, opts).map_err(renamed(names))?;
    table
        .clone()
        .with("delta", Column::Real(g.delta))?
        .with("gamma", Column::Real(g.gamma))?
        .with("theta", Column::Real(g.theta))?
        .with("rho", Column::Real(g.rho))?
        .with("vega", Column::Real(g.vega))
}

#[cfg(test)]
mod tests {
    use super::*;
    use OptionFlag::{Call, Put};

    fn sample_chain() -> ChainTable {
        let n = 3;
        ChainTable::new(n)
            .with("flag", Column::Flag(vec![Call, Call, Put]))
            .and_then(|t| t.with("S", Column::Real(vec![100.0; n])))
            .and_then(|t| t.with("K", Column::Real(vec![95.0, 100.0, 105.0])))
            .and_then(|t| t.with("t", Column::Real(vec![0.25; n])))
            .and_then(|t| t.with("r", Column::Real(vec![0.05; n])))
            .and_then(|t| t.with("sigma", Column::Real(vec![0.2; n])))
            .unwrap()
    }

    #[test]
    fn insert_checks_length_and_replaces() {
        let mut t = sample_chain();
        assert!(t.insert("x", Column::Real(vec![1.0])).is_err());
        t.insert("sigma", Column::Real(vec![0.3; 3])).unwrap();
        assert_eq!(t.real("sigma"), Some(&[0.3; 3][..]));
        assert_eq!(t.names().collect::<Vec<_>>(), ["flag", "S", "K", "t", "r", "sigma"]);
    }

    #[test]
    fn table_pipeline() {
        let opts = BatchOptions::default().with_workers(1);
        let priced = batch_price(Model::BlackScholes, &sample_chain(), &opts).unwrap();
        let inverted = batch_iv(Model::BlackScholes, IvMethod::Lbr, &priced, &opts).unwrap();
        let iv = inverted.real("iv").unwrap();
        assert!(iv.iter().all(|s| (s - 0.2).abs() <= 1e-8), "{iv:?}");
        assert!(inverted.status().unwrap().iter().all(|s| s.is_success()));
        let greeks = batch_greeks(Model::BlackScholes, &inverted, &opts).unwrap();
        assert_eq!(greeks.names().count(), 14);
    }

    #[test]
    fn missing_columns_are_named() {
        let opts = BatchOptions::default().with_workers(1);
        let e = batch_iv(Model::BlackScholes, IvMethod::Halley, &sample_chain(), &opts).unwrap_err();
        assert_eq!(e, BatchError::MissingColumn { column: "price".into() });
        let e = batch_price(Model::BlackScholes, &ChainTable::new(0), &opts).unwrap_err();
        assert_eq!(e.column(), "flag");
    }

    #[test]
    fn errors_use_table_column_names() {
        let opts = BatchOptions::default().with_workers(1);
        let mut t = sample_chain();
        t.insert("K", Column::Real(vec![95.0, -1.0, 105.0])).unwrap();
        let e = batch_price(Model::BlackScholes, &t, &opts).unwrap_err();
        assert_eq!((e.index(), e.column()), (Some(1), "K"));
    }
}

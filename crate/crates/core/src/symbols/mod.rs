//! A small expression language for analytic self-maps of the disk, with a
//! compiler to dual-number evaluators and a boundary-sampling validator.

mod compile;
mod expr;
mod parse;

pub use compile::{
    validate_self_map, Symbol, SymbolError, ValidationReport, DEFAULT_VALIDATION_RESOLUTION, STRICT_MARGIN,
    VALIDATION_MAX_RADIUS, VALIDATION_TOL,
};
pub use expr::{SymbolExpr, MAX_POWER, UNIMODULAR_TOL};
pub use parse::{parse_complex, parse_symbol, ParseError};

/// Pointwise power `φ^n` of a compiled symbol.
pub fn pointwise_power(sym: &Symbol, n: u32) -> Result<Symbol, SymbolError> {
    sym.pointwise_power(n)
}

#[cfg(test)]
mod property_tests;

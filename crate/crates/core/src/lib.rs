pub mod combination;
pub mod diagnostics;
pub mod disk;
pub mod dual;
pub mod norms;
pub mod random;
pub mod report;
pub mod series;
pub mod symbols;
pub mod testfns;

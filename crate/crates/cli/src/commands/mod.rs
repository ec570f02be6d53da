pub mod bench;
pub mod check;
pub mod rates;
pub mod simulate;
pub mod solve;
pub mod sweep;

pub mod common;
pub mod evaluate;
pub mod predict;
pub mod simulate;
pub mod tune;

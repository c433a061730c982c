// Oracles index explicitly and reject NaN through negated comparisons.
#![allow(
    dead_code,
    clippy::needless_range_loop,
    clippy::neg_cmp_op_on_partial_ord
)]

pub mod bank_response;
pub mod causality;
pub mod fusion_table;
pub mod gradcheck;
pub mod metric_suite;
pub mod oracles;

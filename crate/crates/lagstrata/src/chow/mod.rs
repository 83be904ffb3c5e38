//! Schubert calculus on G(3,6) and LG(n,2n), and the integer bookkeeping built on it.

pub mod arithmetic;
pub mod grassmannian;
pub mod lagrangian_grassmannian;

pub use arithmetic::{dimension_ledger, hilb3_invariants, HilbInvariants, LedgerRow};
pub use grassmannian::{
    chern_t_dual, connectedness_check, mult_g36, pr_class, ChowClassG36, ConnectednessReport, Partition,
    SignConvention,
};
pub use lagrangian_grassmannian::{exceptional_coefficient, lg_mult, ChowClassLG, ExceptionalReport};

//! Exact higher-order derivatives by evaluation in truncated polynomial
//! (Weil) algebras.
//!
//! An expression is evaluated at `x + d`, where `d = (d₀, …, d_{n−1})` are
//! nilpotent generators of `ℚ[d]/⟨d_i^{k_i+1}⟩`. The coefficient of `d^α`
//! in the result, times `α!`, is the mixed derivative `∂[α]f(x)`, exactly.
//!
//! ```
//! use weiljet::calculus::taylor_box;
//! use weiljet::expr::parse;
//! use weiljet::rational::int;
//!
//! let f = parse("x0^2*x1").unwrap();
//! let table = taylor_box(&f, &[int(1), int(2)], &[2, 1].into()).unwrap();
//! assert_eq!(table.get(&[2, 1].into()), Some(&int(2)));
//! assert_eq!(table.get(&[1, 0].into()), Some(&int(4)));
//! ```

pub mod calculus;
pub mod corpus;
pub mod error;
pub mod expr;
pub mod multiindex;
pub mod oracle;
pub mod rational;
pub mod suites;
pub mod weil;

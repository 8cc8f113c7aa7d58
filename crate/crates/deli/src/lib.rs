//! Toolkit for iterative deliberation on computation-intensive algebra
//! problems: exact symbolic tool interfaces over a small computer-algebra
//! core, expression flow graph (EFG) step metrics, BM25 exemplar
//! retrieval, and a two-stage deliberation orchestrator that drives a
//! pluggable chat-model gateway.

pub mod expr;
pub mod gateway;
pub mod interfaces;

//! DIMACS CNF writer: comment lines mapping each variable to its point id,
//! a `p cnf V C` header, then one zero-terminated clause per line.

use crate::csp::CnfDoc;

pub fn write_dimacs(cnf: &CnfDoc) -> String {
    let mut out = String::new();
    for (var, label) in &cnf.labels {
        out.push_str(&format!("c {var} {label}\n"));
    }
    out.push_str(&format!("p cnf {} {}\n", cnf.var_count, cnf.clauses.len()));
    for clause in &cnf.clauses {
        for lit in clause {
            out.push_str(&format!("{lit} "));
        }
        out.push_str("0\n");
    }
    out
}

//! Sparse SDPA (`.dat-s`) export for cross-checking with external solvers.
//!
//! SDPA's dual problem `max ⟨F0, Y⟩ s.t. ⟨Fi, Y⟩ = ci, Y ⪰ 0` is our
//! standard form with `Y = X`, `Fi = A_i`, `ci = b_i`. `F0` is `C` for a
//! maximisation and `−C` for a minimisation, so the SDPA objective of a
//! minimisation is the negated original one.

use std::io::{self, Write};

use super::{SdpProblem, Sense};
use crate::scalar::Real;

pub fn write_sdpa<T: Real, W: Write>(prob: &SdpProblem<T>, mut out: W) -> io::Result<()> {
    writeln!(out, "* matsos standard-form SDP, sense = {:?}", prob.sense())?;
    writeln!(out, "{}", prob.num_constraints())?;
    writeln!(out, "{}", prob.blocks().len())?;
    let dims: Vec<String> = prob.blocks().iter().map(|b| b.to_string()).collect();
    writeln!(out, "{}", dims.join(" "))?;
    let rhs: Vec<String> = prob.constraints().iter().map(|c| fmt(c.rhs())).collect();
    writeln!(out, "{}", rhs.join(" "))?;
    let sign = match prob.sense() {
        Sense::Maximize => T::one(),
        Sense::Minimize => -T::one(),
    };
    for (b, c) in prob.objective().iter().enumerate() {
        for i in 0..c.nrows() {
            for j in i..c.ncols() {
                if c[(i, j)] != T::zero() {
                    writeln!(out, "0 {} {} {} {}", b + 1, i + 1, j + 1, fmt(sign * c[(i, j)]))?;
                }
            }
        }
    }
    for (k, c) in prob.constraints().iter().enumerate() {
        for e in c.entries() {
            writeln!(out, "{} {} {} {} {}", k + 1, e.block + 1, e.row + 1, e.col + 1, fmt(e.value))?;
        }
    }
    Ok(())
}

fn fmt<T: Real>(v: T) -> String {
    format!("{:.17e}", v.as_f64())
}

#[cfg(test)]
mod tests {
    use super::super::Constraint;
    use super::*;
    use nalgebra::dmatrix;

    #[test]
    fn sdpa_layout() {
        let mut p = SdpProblem::<f64>::new(vec![2], Sense::Minimize);
        p.set_objective(0, dmatrix![1.0, 0.0; 0.0, 2.0]).unwrap();
        let mut c = Constraint::new(1.0);
        c.add(0, 0, 0, 1.0).add(0, 1, 1, 1.0);
        p.add_constraint(c);
        let mut buf = Vec::new();
        write_sdpa(&p, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[1], "1");
        assert_eq!(lines[2], "1");
        assert_eq!(lines[3], "2");
        assert!(lines[5].starts_with("0 1 1 1 -1.0"));
        assert!(lines.iter().any(|l| l.starts_with("1 1 2 2 1.0")));
    }
}

//! Sup-convolution triangle functions on step distributions and a check of
//! their axioms on a small sample.

use pmstat::distfn::StepDistFn;
use pmstat::triangle::{check_triangle_axioms, TNorm, TriangleFn, TriangleOp, DEFAULT_GRID};

fn main() -> pmstat::Result<()> {
    let f = StepDistFn::new(vec![(0.5, 0.6), (1.0, 1.0)])?;
    let g = StepDistFn::new(vec![(0.25, 0.3), (0.75, 1.0)])?;
    let sample = vec![StepDistFn::eps0(), f.clone(), g.clone(), StepDistFn::unit_step(1.5)?];

    let ops = [
        TriangleFn::Maximal,
        TriangleFn::sup_conv(TNorm::Min, DEFAULT_GRID)?,
        TriangleFn::sup_conv(TNorm::Product, DEFAULT_GRID)?,
        TriangleFn::sup_conv(TNorm::Lukasiewicz, DEFAULT_GRID)?,
    ];
    for op in &ops {
        let h = op.apply(&f, &g);
        println!("{:<8} f*g = {:?}", op.tag(), h.jumps());
        let report = check_triangle_axioms(op, op.tag(), &sample, 1e-6)?;
        for a in &report.axioms {
            println!("         {:<14} {}", a.axiom, if a.passed { "ok" } else { "FAILED" });
        }
    }
    Ok(())
}

#![no_main]

use abdg_core::expr::parse_expr;
use abdg_core::jets::{lift_variable, Var};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    let Ok(e) = parse_expr(src) else { return };
    // Accepted expressions must evaluate (possibly to a domain error) without panicking.
    let u = lift_variable(0.3, Var::U, 3).unwrap();
    let v = lift_variable(-0.7, Var::V, 3).unwrap();
    let _ = e.eval_jet(&u, &v);
});

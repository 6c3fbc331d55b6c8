// Closure-capture fixture.

fn main() {
    let f = make_adder();
    let _ = f(1);
}

// The returned closure borrows a local variable.

fn make_adder() -> Box<dyn Fn(i32) -> i32> {
    let n = 10;
    let add = |x| x + n;
    Box::new(add)
}

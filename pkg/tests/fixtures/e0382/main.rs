// Use-after-move fixture.

fn main() {
    let s = String::from("hi");
    consume(s);
}

// x is moved on line 12 and used on line 15.

fn consume(x: String) {
    let _len = x.len();
    let a = x;
    drop(a);
    let n = 1 + 1;
    observe(x, n);
}

fn observe(_s: String, _n: i32) {}

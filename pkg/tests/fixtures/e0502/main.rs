fn main() {
    let mut v = vec![1, 2, 3];
    let shared = &v;
    v.push(4);
    let _n = shared.len();
}

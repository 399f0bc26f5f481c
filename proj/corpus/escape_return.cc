#ext returns
alias Unit = {} Top
alias Op[T, C] = {*} forall(v: T) {*} forall(s: C) C
alias List[T] = {} forall[C <: {*} Top] {} forall(g: Op[T, C]) {g} forall(s: C) C
assume Double <: {} Top
assume nums : List[Double]
assume sumRoots : {} forall(xs: List[Double]) {} forall(ret: {*} forall(x: Double) Double) Double

-- The returned thunk closes over r.
main handle r : {*} forall(u: Unit) Double in
  \(u: Unit) sumRoots nums (\(x: Double) return r (\(u: Unit) x))

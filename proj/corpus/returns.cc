#ext returns
alias Unit = {} Top
alias Op[T, C] = {*} forall(v: T) {*} forall(s: C) C
alias List[T] = {} forall[C <: {*} Top] {} forall(g: Op[T, C]) {g} forall(s: C) C
assume Double <: {} Top
assume nums : List[Double]
assume sumRoots : {} forall(xs: List[Double]) {} forall(ret: {*} forall(x: Double) Double) Double

main handle r : Double in sumRoots nums (\(x: Double) return r x)

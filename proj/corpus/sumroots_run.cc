#ext returns
alias Unit = {} Top
alias Op[T, C] = {*} forall(v: T) {*} forall(s: C) C
alias List[T] = {} forall[C <: {*} Top] {} forall(g: Op[T, C]) {g} forall(s: C) C

def unit = \(u: Unit) u
def nil = /\[T <: {*} Top] /\[C <: {*} Top] \(g: Op[T, C]) \(s: C) s
def cons = /\[T <: {*} Top] \(hd: T) \(tl: List[T]) /\[C <: {*} Top] \(g: Op[T, C]) \(s: C) g hd (tl [C] g s)

-- Every element escapes through ret; the fold never finishes.
def sumRoots = \(xs: List[Unit]) \(ret: {*} forall(x: Unit) Unit) xs [Unit] (\(v: Unit) \(s: Unit) ret v) unit

main handle r : Unit in sumRoots (cons [Unit] unit (nil [Unit])) (\(x: Unit) return r x)

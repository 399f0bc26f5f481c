alias U = Top

def f' = /\[X <: {*} U] \(x: X) \(y: X) y
def g = \(x: {*} U) (\(y: {x} U) y) x

main g

#ext regions
alias Unit = {} Top

def unit = \(u: Unit) u
def deref = /\[Y <: {*} Top] \(y: {*} Ptr[Y]) !y

main region r in deref [Unit] (new r [Unit] unit)

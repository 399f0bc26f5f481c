-- x may only appear covariantly in the type of its own scope.
alias U = Top

main \(x: {*} U) \(y: {x} U) y

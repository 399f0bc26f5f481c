-- Loggers over two global capabilities.
alias Unit = {} Top
assume String <: {} Top
alias Logger = forall(line: String) Unit
assume File : {*} forall(line: String) Unit
assume Console : {*} forall(line: String) Unit

def unit = (/\[X <: {} Top] \(x: X) x) [{} Top] (\(u: {} Top) u)

def fileLogger = \(line: String) File line
def printLogger = \(line: String) Console line
def pureLogger = \(line: String) unit
def widened : {File} Logger = pureLogger

def warn = \(log: {*} Logger) \(line: String) log line

-- Church booleans stand in for if-then-else.
def true = /\[T <: {*} Top] \(a: T) \(b: T) a
def consoleLogger = printLogger
def someLogger = ((\(log: {*} Logger) true) consoleLogger) [{File} Logger] fileLogger pureLogger

main warn printLogger

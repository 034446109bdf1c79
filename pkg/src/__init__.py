# Qutrit projection simulator package

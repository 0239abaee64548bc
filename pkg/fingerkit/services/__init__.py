# Kinematics, optimisation and force services

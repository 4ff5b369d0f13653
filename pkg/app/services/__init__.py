# Staircase Services

Number = int(input("number = "))
print("Factorial of ", number, "is ")
fact = 0
if (number < 0):
    fact = 0
elif (number == 0 or number == 1):
    fact = 1
else:
    fact = 1
while (number > 1):
    fact *= number
    number -= 1
print (fact)
